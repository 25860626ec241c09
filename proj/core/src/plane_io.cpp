#include "planettt/plane_io.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "json.hpp"

namespace planettt {

namespace {

using nlohmann::json;

std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> words;
  std::istringstream in{std::string(line)};
  for (std::string w; in >> w;) words.push_back(std::move(w));
  return words;
}

// Assembles a plane from names and labelled classes, checking references.
class PlaneBuilder {
 public:
  void set_order(int order) { plane_.order = order; }

  void set_points(std::vector<std::string> names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!ids_.emplace(names[i], static_cast<PointId>(i)).second) {
        throw DesignError("plane: duplicate point " + names[i]);
      }
    }
    plane_.point_names = std::move(names);
  }

  void set_index_label(std::string label) { index_label_ = std::move(label); }

  void begin_class(std::string label) {
    for (const auto& cls : plane_.classes) {
      if (cls.label == label) throw DesignError("plane: duplicate class " + label);
    }
    plane_.classes.push_back({std::move(label), {}});
  }

  void add_line(const std::vector<std::string>& names) {
    if (plane_.classes.empty()) throw DesignError("plane: line before any class");
    Line line;
    for (const auto& name : names) {
      auto it = ids_.find(name);
      if (it == ids_.end()) throw DesignError("plane: unknown point " + name);
      line.push_back(it->second);
    }
    std::sort(line.begin(), line.end());
    plane_.classes.back().lines.push_back(plane_.lines.size());
    plane_.lines.push_back(std::move(line));
  }

  AffinePlane finish() {
    if (plane_.order <= 0) throw DesignError("plane: missing order");
    if (plane_.point_names.empty()) throw DesignError("plane: missing points");
    bool found = false;
    for (std::size_t c = 0; c < plane_.classes.size(); ++c) {
      if (plane_.classes[c].label == index_label_) {
        plane_.index_class = c;
        found = true;
      }
    }
    if (!found) throw DesignError("plane: index class '" + index_label_ + "' not defined");
    return std::move(plane_);
  }

 private:
  AffinePlane plane_;
  std::map<std::string, PointId, std::less<>> ids_;
  std::string index_label_;
};

std::string points_of(const AffinePlane& plane, const Line& line) {
  std::string out;
  for (PointId p : line) out += " " + plane.point_names.at(p);
  return out;
}

}  // namespace

std::string write_plane_text(const AffinePlane& plane) {
  std::ostringstream out;
  out << "affine-plane " << plane.order << "\n";
  out << "points";
  for (const auto& name : plane.point_names) out << " " << name;
  out << "\n";
  out << "index-class " << plane.classes.at(plane.index_class).label << "\n";
  for (const auto& cls : plane.classes) {
    out << "class " << cls.label << "\n";
    for (std::size_t l : cls.lines) out << "line" << points_of(plane, plane.lines.at(l)) << "\n";
  }
  return out.str();
}

AffinePlane read_plane_text(std::string_view text) {
  PlaneBuilder builder;
  std::istringstream in{std::string(text)};
  bool header = false;
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    auto words = split_words(raw);
    if (words.empty()) continue;
    const std::string keyword = words.front();
    words.erase(words.begin());
    auto fail = [&](const std::string& what) {
      throw DesignError("plane text line " + std::to_string(line_no) + ": " + what);
    };
    if (keyword == "affine-plane") {
      if (words.size() != 1) fail("expected 'affine-plane <order>'");
      try {
        builder.set_order(std::stoi(words[0]));
      } catch (const std::exception&) {
        fail("bad order '" + words[0] + "'");
      }
      header = true;
    } else if (!header) {
      fail("missing 'affine-plane' header");
    } else if (keyword == "points") {
      builder.set_points(std::move(words));
    } else if (keyword == "index-class") {
      if (words.size() != 1) fail("expected 'index-class <label>'");
      builder.set_index_label(words[0]);
    } else if (keyword == "class") {
      if (words.size() != 1) fail("expected 'class <label>'");
      builder.begin_class(words[0]);
    } else if (keyword == "line") {
      builder.add_line(words);
    } else {
      fail("unknown keyword '" + keyword + "'");
    }
  }
  return builder.finish();
}

std::string write_plane_json(const AffinePlane& plane) {
  json doc;
  doc["type"] = "affine-plane";
  doc["order"] = plane.order;
  doc["points"] = plane.point_names;
  doc["index_class"] = plane.classes.at(plane.index_class).label;
  json classes = json::array();
  for (const auto& cls : plane.classes) {
    json lines = json::array();
    for (std::size_t l : cls.lines) {
      json line = json::array();
      for (PointId p : plane.lines.at(l)) line.push_back(plane.point_names.at(p));
      lines.push_back(std::move(line));
    }
    classes.push_back({{"label", cls.label}, {"lines", std::move(lines)}});
  }
  doc["classes"] = std::move(classes);
  return doc.dump(2) + "\n";
}

AffinePlane read_plane_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DesignError(std::string("plane json: ") + e.what());
  }
  try {
    if (doc.at("type").get<std::string>() != "affine-plane") {
      throw DesignError("plane json: type is not 'affine-plane'");
    }
    PlaneBuilder builder;
    builder.set_order(doc.at("order").get<int>());
    builder.set_points(doc.at("points").get<std::vector<std::string>>());
    builder.set_index_label(doc.at("index_class").get<std::string>());
    for (const auto& cls : doc.at("classes")) {
      builder.begin_class(cls.at("label").get<std::string>());
      for (const auto& line : cls.at("lines")) {
        builder.add_line(line.get<std::vector<std::string>>());
      }
    }
    return builder.finish();
  } catch (const json::exception& e) {
    throw DesignError(std::string("plane json: ") + e.what());
  }
}

AffinePlane read_plane(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return read_plane_json(text);
  return read_plane_text(text);
}

std::string write_mols_text(const MolsSet& mols) {
  std::ostringstream out;
  out << "mols " << mols.order << " " << mols.squares.size() << "\n";
  for (std::size_t s = 0; s < mols.squares.size(); ++s) {
    out << "square " << s + 1 << "\n";
    for (const auto& row : mols.squares[s].rows()) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << row[c];
      out << "\n";
    }
  }
  return out.str();
}

std::string write_transversal_design_text(const TransversalDesign& td) {
  std::ostringstream out;
  out << "transversal-design " << td.k << " " << td.n << "\n";
  auto write_set = [&](const char* keyword, const std::vector<PlanePoint>& pts) {
    out << keyword;
    for (const auto& p : pts) out << " " << to_string(p);
    out << "\n";
  };
  for (const auto& group : td.groups) write_set("group", group);
  if (td.resolved()) {
    for (const auto& cls : td.classes) {
      out << "class " << cls.label << "\n";
      for (std::size_t b : cls.blocks) write_set("block", td.blocks.at(b));
    }
  } else {
    for (const auto& block : td.blocks) write_set("block", block);
  }
  return out.str();
}

std::string write_mols_json(const MolsSet& mols) {
  json squares = json::array();
  for (const auto& sq : mols.squares) squares.push_back(sq.rows());
  const json doc = {{"type", "mols"}, {"order", mols.order}, {"squares", squares}};
  return doc.dump(2) + "\n";
}

std::string write_transversal_design_json(const TransversalDesign& td) {
  auto names = [](const std::vector<PlanePoint>& pts) {
    json out = json::array();
    for (const auto& p : pts) out.push_back(to_string(p));
    return out;
  };
  json groups = json::array();
  for (const auto& g : td.groups) groups.push_back(names(g));
  json doc = {{"type", "transversal-design"}, {"k", td.k}, {"n", td.n}, {"groups", groups}};
  if (td.resolved()) {
    json classes = json::array();
    for (const auto& cls : td.classes) {
      json blocks = json::array();
      for (std::size_t b : cls.blocks) blocks.push_back(names(td.blocks.at(b)));
      classes.push_back({{"label", cls.label}, {"blocks", blocks}});
    }
    doc["classes"] = classes;
  } else {
    json blocks = json::array();
    for (const auto& b : td.blocks) blocks.push_back(names(b));
    doc["blocks"] = blocks;
  }
  return doc.dump(2) + "\n";
}

}  // namespace planettt
