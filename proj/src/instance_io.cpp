#include "dsfm/instance_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dsfm/potentials.hpp"

namespace dsfm {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  fail(ErrorCategory::parse, "line " + std::to_string(line) + ": " + what);
}

// Sequential token reader over one record line.
struct LineTokens {
  std::istringstream in;
  int line;

  LineTokens(const std::string& text, int line_) : in(text), line(line_) {}

  std::string word(const char* what) {
    std::string t;
    if (!(in >> t)) parse_fail(line, std::string("expected ") + what);
    return t;
  }

  int integer(const char* what) {
    const std::string t = word(what);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size())
      parse_fail(line, std::string("expected ") + what + ", got '" + t + "'");
    return v;
  }

  double real(const char* what) {
    const std::string t = word(what);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size())
      parse_fail(line, std::string("expected ") + what + ", got '" + t + "'");
    return v;
  }

  void done() {
    std::string extra;
    if (in >> extra)
      parse_fail(line, "trailing content starting at '" + extra + "'");
  }
};

// Next meaningful line, or false at end of input. *line counts every line.
bool next_record(std::istream& in, std::string* text, int* line) {
  while (std::getline(in, *text)) {
    ++*line;
    const auto pos = text->find_first_not_of(" \t\r");
    if (pos == std::string::npos || (*text)[pos] == '#') continue;
    return true;
  }
  return false;
}

std::vector<int> read_ids(LineTokens& t, int count, int cap) {
  if (count < 1) parse_fail(t.line, "id count must be positive");
  if (count > cap)
    parse_fail(t.line,
               "id count exceeds the format cap of " + std::to_string(cap));
  std::vector<int> ids(count);
  for (int j = 0; j < count; ++j) ids[j] = t.integer("element id");
  return ids;
}

std::unique_ptr<SubmodularPotential> read_potential(const std::string& text,
                                                    int line) {
  LineTokens t(text, line);
  const std::string tag = t.word("record tag");
  std::unique_ptr<SubmodularPotential> pot;
  try {
    if (tag == "unary") {
      const int id = t.integer("element id");
      const double delta = t.real("delta");
      pot = std::make_unique<UnaryPotential>(id, delta);
    } else if (tag == "edge") {
      const int u = t.integer("element id");
      const int v = t.integer("element id");
      const double w = t.real("weight");
      pot = std::make_unique<EdgeCutPotential>(u, v, w);
    } else if (tag == "square") {
      const int a = t.integer("corner id");
      const int b = t.integer("corner id");
      const int c = t.integer("corner id");
      const int d = t.integer("corner id");
      const double s = t.real("scale");
      pot = std::make_unique<SquarePotential>(a, b, c, d, s);
    } else if (tag == "region") {
      pot = std::make_unique<RegionPotential>(
          read_ids(t, t.integer("id count"), 32));
    } else if (tag == "table") {
      const auto ids = read_ids(t, t.integer("id count"), 20);
      std::vector<double> values(std::size_t(1) << ids.size());
      for (double& v : values) v = t.real("table value");
      pot = std::make_unique<TablePotential>(ids, std::move(values));
    } else {
      parse_fail(line, "unknown record tag '" + tag + "'");
    }
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::parse) throw;
    fail(e.category(), "line " + std::to_string(line) + ": " + e.what());
  }
  t.done();
  return pot;
}

std::string subset_names(const SubmodularPotential& pot, Mask m) {
  std::string out = "{";
  for (int id : mask_to_ids(pot, m)) {
    if (out.size() > 1) out += ", ";
    out += std::to_string(id);
  }
  return out + "}";
}

}  // namespace

DecomposableInstance read_instance(std::istream& in) {
  int line = 0;
  std::string text;

  if (!next_record(in, &text, &line)) parse_fail(1, "empty input");
  {
    LineTokens t(text, line);
    if (t.word("format magic") != "dsfm-instance")
      parse_fail(line, "not a dsfm-instance file");
    const int version = t.integer("format version");
    if (version != 1)
      parse_fail(line, "unsupported format version " + std::to_string(version));
    t.done();
  }

  auto header_int = [&](const char* key) {
    if (!next_record(in, &text, &line))
      parse_fail(line + 1, std::string("missing '") + key + "' header line");
    LineTokens t(text, line);
    if (t.word("header key") != key)
      parse_fail(line, std::string("expected '") + key + "' header line");
    const int v = t.integer(key);
    t.done();
    if (v < 0) parse_fail(line, std::string(key) + " must be nonnegative");
    return v;
  };
  const int n = header_int("n");
  const int r = header_int("r");

  std::vector<std::unique_ptr<SubmodularPotential>> pots;
  std::vector<int> record_lines;
  pots.reserve(r);
  for (int i = 0; i < r; ++i) {
    if (!next_record(in, &text, &line))
      parse_fail(line + 1, "expected " + std::to_string(r) +
                               " potential records, found " + std::to_string(i));
    pots.push_back(read_potential(text, line));
    record_lines.push_back(line);
  }
  if (next_record(in, &text, &line))
    parse_fail(line, "content after the declared " + std::to_string(r) +
                         " records");

  for (int i = 0; i < r; ++i) {
    const auto& pot = *pots[i];
    if (pot.kind() != Kind::table || pot.arity() > 12) continue;
    Mask x = 0, y = 0;
    if (!submodularity_witness(pot, &x, &y))
      fail(ErrorCategory::validation,
           "line " + std::to_string(record_lines[i]) +
               ": table is not submodular: f(X) + f(Y) < f(X|Y) + f(X&Y) for "
               "X=" + subset_names(pot, x) + " Y=" + subset_names(pot, y));
  }

  try {
    return DecomposableInstance(GroundSet(n), std::move(pots));
  } catch (const Error& e) {
    fail(e.category(), std::string("instance rejected: ") + e.what());
  }
}

DecomposableInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::invalid_input, "cannot open '" + path + "'");
  try {
    return read_instance(in);
  } catch (const Error& e) {
    fail(e.category(), path + ": " + e.what());
  }
}

std::string format_float(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_instance(std::ostream& out, const DecomposableInstance& inst) {
  out << "dsfm-instance 1\n";
  out << "n " << inst.n() << "\n";
  out << "r " << inst.r() << "\n";
  for (int i = 0; i < inst.r(); ++i) {
    const auto& pot = inst.potential(i);
    switch (pot.kind()) {
      case Kind::unary: {
        const auto& u = static_cast<const UnaryPotential&>(pot);
        out << "unary " << u.support()[0] << " " << format_float(u.delta())
            << "\n";
        break;
      }
      case Kind::edge_cut: {
        const auto& e = static_cast<const EdgeCutPotential&>(pot);
        out << "edge " << e.support()[0] << " " << e.support()[1] << " "
            << format_float(e.weight()) << "\n";
        break;
      }
      case Kind::square: {
        const auto& s = static_cast<const SquarePotential&>(pot);
        out << "square";
        for (int id : s.corners()) out << " " << id;
        out << " " << format_float(s.scale()) << "\n";
        break;
      }
      case Kind::region: {
        out << "region " << pot.arity();
        for (int id : pot.support()) out << " " << id;
        out << "\n";
        break;
      }
      case Kind::table: {
        const auto& tp = static_cast<const TablePotential&>(pot);
        out << "table " << tp.arity();
        for (int id : tp.support()) out << " " << id;
        for (double v : tp.table()) out << " " << format_float(v);
        out << "\n";
        break;
      }
      case Kind::custom:
        fail(ErrorCategory::capability,
             "potential " + std::to_string(i) +
                 " is an opaque function; no serialized form exists");
    }
  }
}

void save_instance(const std::string& path, const DecomposableInstance& inst) {
  std::ostringstream buf;
  write_instance(buf, inst);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCategory::invalid_input, "cannot open '" + path + "'");
  out << buf.str();
  if (!out.flush()) fail(ErrorCategory::invalid_input, "write failed: " + path);
}

}  // namespace dsfm
