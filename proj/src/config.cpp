#include "spl/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "spl/weights.hpp"

namespace spl {

namespace {

struct RawKV {
  std::string path;
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// strip a trailing comment, respecting quoted strings
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '"') in_str = !in_str;
    if (c == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

// split an inline-table body on top-level commas
std::vector<std::string> split_top_commas(const std::string& body) {
  std::vector<std::string> parts;
  std::string cur;
  bool in_str = false;
  int depth = 0;
  for (char c : body) {
    if (c == '"') in_str = !in_str;
    if (!in_str) {
      if (c == '{') ++depth;
      if (c == '}') --depth;
      if (c == ',' && depth == 0) {
        parts.push_back(cur);
        cur.clear();
        continue;
      }
    }
    cur += c;
  }
  if (!trim(cur).empty()) parts.push_back(cur);
  return parts;
}

void emit_pair(const std::string& prefix, const std::string& stmt, int line_no,
               std::vector<RawKV>& out, std::vector<std::string>& errors) {
  size_t eq = std::string::npos;
  bool in_str = false;
  for (size_t i = 0; i < stmt.size(); ++i) {
    if (stmt[i] == '"') in_str = !in_str;
    if (stmt[i] == '=' && !in_str) {
      eq = i;
      break;
    }
  }
  if (eq == std::string::npos) {
    errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
    return;
  }
  std::string key = trim(stmt.substr(0, eq));
  std::string val = trim(stmt.substr(eq + 1));
  if (key.empty() || val.empty()) {
    errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
    return;
  }
  std::string path = prefix.empty() ? key : prefix + "." + key;
  if (val.front() == '{') {
    if (val.back() != '}') {
      errors.push_back("line " + std::to_string(line_no) + ": unterminated inline table");
      return;
    }
    for (const std::string& part : split_top_commas(val.substr(1, val.size() - 2)))
      emit_pair(path, trim(part), line_no, out, errors);
    return;
  }
  out.push_back({path, val, line_no});
}

bool parse_number(const std::string& raw, double* x) {
  char* end = nullptr;
  *x = std::strtod(raw.c_str(), &end);
  return end != nullptr && *end == '\0' && end != raw.c_str();
}

bool parse_integer(const std::string& raw, long long* x) {
  char* end = nullptr;
  *x = std::strtoll(raw.c_str(), &end, 10);
  return end != nullptr && *end == '\0' && end != raw.c_str();
}

bool parse_unsigned(const std::string& raw, unsigned long long* x) {
  if (!raw.empty() && raw[0] == '-') return false;
  char* end = nullptr;
  *x = std::strtoull(raw.c_str(), &end, 10);
  return end != nullptr && *end == '\0' && end != raw.c_str();
}

}  // namespace

ParseResult parse_config_text(const std::string& text) {
  ParseResult res;
  RunConfig& cfg = res.config;
  std::vector<std::string>& errors = res.errors;

  std::vector<RawKV> pairs;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        errors.push_back("line " + std::to_string(line_no) + ": malformed section header");
        continue;
      }
      section = trim(s.substr(1, s.size() - 2));
      if (section != "domain" && section != "weight" && section != "f" &&
          section != "tol") {
        errors.push_back("line " + std::to_string(line_no) + ": unknown section [" +
                         section + "]");
        section = "!" + section;  // swallow its keys without unknown-key noise
      }
      continue;
    }
    if (!section.empty() && section[0] == '!') continue;
    emit_pair(section, s, line_no, pairs, errors);
  }

  auto num_setter = [&errors](double* slot, const char* name) {
    return [slot, name, &errors](const RawKV& kv) {
      double x;
      if (parse_number(kv.value, &x))
        *slot = x;
      else
        errors.push_back("line " + std::to_string(kv.line) + ": " + name +
                         " expects a number, got " + kv.value);
    };
  };
  auto int_setter = [&errors](int* slot, const char* name) {
    return [slot, name, &errors](const RawKV& kv) {
      long long x;
      if (parse_integer(kv.value, &x))
        *slot = static_cast<int>(x);
      else
        errors.push_back("line " + std::to_string(kv.line) + ": " + name +
                         " expects an integer, got " + kv.value);
    };
  };
  auto str_setter = [&errors](std::string* slot, const char* name) {
    return [slot, name, &errors](const RawKV& kv) {
      if (kv.value.size() >= 2 && kv.value.front() == '"' && kv.value.back() == '"')
        *slot = kv.value.substr(1, kv.value.size() - 2);
      else
        errors.push_back("line " + std::to_string(kv.line) + ": " + name +
                         " expects a quoted string, got " + kv.value);
    };
  };
  auto bool_setter = [&errors](bool* slot, const char* name) {
    return [slot, name, &errors](const RawKV& kv) {
      if (kv.value == "true")
        *slot = true;
      else if (kv.value == "false")
        *slot = false;
      else
        errors.push_back("line " + std::to_string(kv.line) + ": " + name +
                         " expects true or false, got " + kv.value);
    };
  };

  std::map<std::string, std::function<void(const RawKV&)>> setters;
  setters["case"] = str_setter(&cfg.case_id, "case");
  setters["seed"] = [&](const RawKV& kv) {
    unsigned long long x;
    if (parse_unsigned(kv.value, &x))
      cfg.seed = x;
    else
      errors.push_back("line " + std::to_string(kv.line) +
                       ": seed expects a nonnegative integer, got " + kv.value);
  };
  setters["out"] = str_setter(&cfg.out, "out");
  setters["resolution"] = int_setter(&cfg.resolution, "resolution");
  setters["p"] = num_setter(&cfg.p, "p");
  setters["q"] = num_setter(&cfg.q, "q");
  setters["lambda"] = num_setter(&cfg.lambda, "lambda");
  setters["lambda_auto"] = bool_setter(&cfg.lambda_auto, "lambda_auto");
  setters["r"] = num_setter(&cfg.r, "r");
  setters["k"] = num_setter(&cfg.k, "k");
  setters["eps_first"] = int_setter(&cfg.eps_first, "eps_first");
  setters["eps_last"] = int_setter(&cfg.eps_last, "eps_last");

  setters["domain.kind"] = str_setter(&cfg.domain.kind, "domain.kind");
  setters["domain.a"] = num_setter(&cfg.domain.a, "domain.a");
  setters["domain.b"] = num_setter(&cfg.domain.b, "domain.b");
  setters["domain.ax"] = num_setter(&cfg.domain.ax, "domain.ax");
  setters["domain.ay"] = num_setter(&cfg.domain.ay, "domain.ay");
  setters["domain.bx"] = num_setter(&cfg.domain.bx, "domain.bx");
  setters["domain.by"] = num_setter(&cfg.domain.by, "domain.by");
  setters["domain.cx"] = num_setter(&cfg.domain.cx, "domain.cx");
  setters["domain.cy"] = num_setter(&cfg.domain.cy, "domain.cy");
  setters["domain.radius"] = num_setter(&cfg.domain.radius, "domain.radius");

  setters["weight.kind"] = str_setter(&cfg.weight.kind, "weight.kind");
  setters["weight.value"] = num_setter(&cfg.weight.value, "weight.value");
  setters["weight.alpha"] = num_setter(&cfg.weight.alpha, "weight.alpha");
  setters["weight.path"] = str_setter(&cfg.weight.path, "weight.path");
  setters["weight.s"] = num_setter(&cfg.weight.s, "weight.s");
  setters["weight.morrey_q"] = num_setter(&cfg.weight.morrey_q, "weight.morrey_q");
  setters["weight.morrey_alpha"] =
      num_setter(&cfg.weight.morrey_alpha, "weight.morrey_alpha");

  setters["f.kind"] = str_setter(&cfg.f.kind, "f.kind");
  setters["f.c0"] = num_setter(&cfg.f.c0, "f.c0");
  setters["f.c1"] = num_setter(&cfg.f.c1, "f.c1");
  setters["f.beta"] = num_setter(&cfg.f.beta, "f.beta");
  setters["f.path"] = str_setter(&cfg.f.path, "f.path");

  setters["tol.defect"] = num_setter(&cfg.tol.defect, "tol.defect");
  setters["tol.residual"] = num_setter(&cfg.tol.residual, "tol.residual");
  setters["tol.continuation"] = num_setter(&cfg.tol.continuation, "tol.continuation");
  setters["tol.solver"] = num_setter(&cfg.tol.solver, "tol.solver");
  setters["tol.minimize"] = num_setter(&cfg.tol.minimize, "tol.minimize");

  std::set<std::string> seen;
  for (const RawKV& kv : pairs) {
    auto it = setters.find(kv.path);
    if (it == setters.end()) {
      errors.push_back("line " + std::to_string(kv.line) + ": unknown key " + kv.path);
      continue;
    }
    if (!seen.insert(kv.path).second) {
      errors.push_back("line " + std::to_string(kv.line) + ": duplicate key " + kv.path);
      continue;
    }
    it->second(kv);
  }

  for (const std::string& e : validate_config(cfg)) errors.push_back(e);
  return res;
}

std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<std::string> errors;
  auto bad = [&errors](const std::string& msg) { errors.push_back(msg); };

  if (cfg.case_id != "I" && cfg.case_id != "II")
    bad("case must be \"I\" or \"II\", got \"" + cfg.case_id + "\"");
  if (cfg.resolution < 2) bad("violated bound resolution >= 2");
  if (!(cfg.p > 1.0)) bad("violated bound p > 1");
  if (!(cfg.q > 0.0 && cfg.q < 1.0)) bad("violated bound 0 < q < 1");

  int n = cfg.domain.kind == "interval" ? 1 : 2;
  if (cfg.domain.kind == "interval") {
    if (!(cfg.domain.a < cfg.domain.b)) bad("violated bound domain.a < domain.b");
  } else if (cfg.domain.kind == "rect") {
    if (!(cfg.domain.ax < cfg.domain.bx)) bad("violated bound domain.ax < domain.bx");
    if (!(cfg.domain.ay < cfg.domain.by)) bad("violated bound domain.ay < domain.by");
  } else if (cfg.domain.kind == "disk") {
    if (!(cfg.domain.radius > 0.0)) bad("violated bound domain.radius > 0");
  } else {
    bad("domain.kind must be \"interval\", \"rect\" or \"disk\", got \"" +
        cfg.domain.kind + "\"");
  }

  if (cfg.weight.kind == "constant") {
    if (!(cfg.weight.value > 0.0)) bad("violated bound weight.value > 0");
  } else if (cfg.weight.kind == "power") {
    if (cfg.p > 1.0 &&
        !(cfg.weight.alpha > -n && cfg.weight.alpha < n * (cfg.p - 1.0)))
      bad("violated bound -n < weight.alpha < n (p - 1)");
  } else if (cfg.weight.kind == "table") {
    if (cfg.weight.path.empty()) bad("weight.path is required for tabulated weights");
  } else {
    bad("weight.kind must be \"constant\", \"power\" or \"table\", got \"" +
        cfg.weight.kind + "\"");
  }

  double s = cfg.weight.s;
  if (cfg.p > 1.0) {
    double s_lo = 1.0 / (cfg.p - 1.0), s_np = n / cfg.p;
    if (s < 0.0) {
      s = std::max(s_lo, s_np) + 1.0;
    } else {
      if (!(s >= s_lo)) bad("violated bound weight.s >= 1/(p-1)");
      if (!(s > s_np)) bad("violated bound weight.s > n/p");
    }
  }

  if (cfg.weight.morrey_q >= 0.0 && !(cfg.weight.morrey_q > n))
    bad("violated bound weight.morrey_q > n");
  if (cfg.weight.morrey_alpha >= 0.0) {
    double mq = cfg.weight.morrey_q >= 0.0 ? cfg.weight.morrey_q : n + 1.0;
    double hi = cfg.p > 1.0 && mq > 0.0
                    ? std::min(1.0, cfg.p * n / (mq * (cfg.p - 1.0)))
                    : 1.0;
    if (!(cfg.weight.morrey_alpha > 0.0 && cfg.weight.morrey_alpha < hi))
      bad("violated bound 0 < weight.morrey_alpha < min{1, pn/(morrey_q (p-1))}");
  }

  if (cfg.f.kind != "affine" && cfg.f.kind != "power_shift" && cfg.f.kind != "table")
    bad("f.kind must be \"affine\", \"power_shift\" or \"table\", got \"" + cfg.f.kind +
        "\"");
  if (cfg.f.kind == "table" && cfg.f.path.empty())
    bad("f.path is required for tabulated profiles");

  if (cfg.case_id == "I") {
    if (!(cfg.lambda > 0.0)) bad("violated bound lambda > 0");
  } else if (cfg.case_id == "II") {
    if (!cfg.lambda_auto && !(cfg.lambda >= 0.0)) bad("violated bound lambda >= 0");
    if (!(cfg.r > cfg.p - 1.0)) bad("violated bound r > p - 1");
    if (cfg.p > 1.0 && s > 0.0) {
      try {
        EmbeddingExponents emb = embedding_exponents(cfg.p, s, n);
        if (emb.p_s_star_finite && !(cfg.r + 1.0 < emb.p_s_star))
          bad("violated bound r < p_s_star - 1");
      } catch (const std::exception&) {
        // s violations already reported above
      }
    }
    if (!(cfg.k > 0.0 && cfg.k <= 1.0)) bad("violated bound 0 < k <= 1");
    if (cfg.eps_first < 1) bad("violated bound eps_first >= 1");
    if (cfg.eps_last < cfg.eps_first) bad("violated bound eps_last >= eps_first");
    if (cfg.eps_last > 40) bad("violated bound eps_last <= 40");
  }

  if (!(cfg.tol.defect > 0.0)) bad("violated bound tol.defect > 0");
  if (!(cfg.tol.residual > 0.0)) bad("violated bound tol.residual > 0");
  if (!(cfg.tol.continuation > 0.0)) bad("violated bound tol.continuation > 0");
  if (!(cfg.tol.solver > 0.0)) bad("violated bound tol.solver > 0");
  if (!(cfg.tol.minimize > 0.0)) bad("violated bound tol.minimize > 0");

  return errors;
}

ParseResult parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult res;
    res.errors.push_back("cannot read config file: " + path);
    return res;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace spl
