#!/usr/bin/env python3
"""Runs `planettt serve` and checks live responses against docs/schemas."""

import json
import random
import socket
import subprocess
import sys
import time
from pathlib import Path

import jsonschema
import requests


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def main():
    binary, schemas = sys.argv[1], Path(sys.argv[2])
    schema = {p.name.split(".")[0]: json.loads(p.read_text()) for p in schemas.glob("*.schema.json")}
    port = free_port()
    proc = subprocess.Popen([binary, "serve", "--bind", f"127.0.0.1:{port}"], stdout=subprocess.DEVNULL)
    base = f"http://127.0.0.1:{port}"
    try:
        for _ in range(100):
            try:
                requests.get(base + "/v1/plane", timeout=1)
                break
            except requests.ConnectionError:
                time.sleep(0.05)
        rng = random.Random(5)
        for engine, side in [("paper_strategy", "ophelia"), ("solver", "xeno"), ("solver", "ophelia")]:
            body = {"engine": engine, "human_side": side}
            jsonschema.validate(body, schema["create-game"])
            g = requests.post(base + "/v1/games", json=body).json()
            jsonschema.validate(g, schema["game"])
            while g["status"] == "ongoing":
                jsonschema.validate(requests.get(f"{base}/v1/games/{g['id']}/hint").json(), schema["hint"])
                free = [p["name"] for p in g["points"] if p["owner"] is None]
                move = {"point": rng.choice(free), "ply": g["ply"]}
                jsonschema.validate(move, schema["move"])
                g = requests.post(f"{base}/v1/games/{g['id']}/moves", json=move).json()
                jsonschema.validate(g, schema["game"])
            text = requests.get(f"{base}/v1/games/{g['id']}/record").text
            if text != g["record"]:
                raise SystemExit(f"record export {text!r} differs from {g['record']!r}")
        for method, path, body in [("POST", "/v1/games", {"engine": "x"}), ("GET", "/v1/games/0", None),
                                   ("DELETE", "/v1/plane", None)]:
            r = requests.request(method, base + path, json=body)
            jsonschema.validate(r.json(), schema["error"])
        print("service responses match the schemas")
    finally:
        proc.terminate()
        proc.wait()


if __name__ == "__main__":
    main()
