#include "kirchhoff/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

constexpr const char kSchemaText[] =
#include "schema_text.inc"
    ;

std::string escape_token(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

// Forward iterator over the text that publishes how far the lexer has read.
struct TrackingIterator {
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  const char** cursor = nullptr;

  reference operator*() const { return *p; }
  TrackingIterator& operator++() {
    ++p;
    if (cursor) *cursor = p;
    return *this;
  }
  TrackingIterator operator++(int) {
    TrackingIterator old = *this;
    ++*this;
    return old;
  }
  bool operator==(const TrackingIterator& o) const { return p == o.p; }
  bool operator!=(const TrackingIterator& o) const { return p != o.p; }
};

// Records the line of every value; object members are keyed at their key.
class LineRecorder {
 public:
  using number_integer_t = Json::number_integer_t;
  using number_unsigned_t = Json::number_unsigned_t;
  using number_float_t = Json::number_float_t;
  using string_t = Json::string_t;
  using binary_t = Json::binary_t;

  LineRecorder(std::string_view text, const char** cursor, LineMap& lines)
      : text_(text), cursor_(cursor), lines_(lines) {
    for (std::size_t i = 0; i < text.size(); ++i)
      if (text[i] == '\n') newlines_.push_back(i);
  }

  bool null() { return value(); }
  bool boolean(bool) { return value(); }
  bool number_integer(number_integer_t) { return value(); }
  bool number_unsigned(number_unsigned_t) { return value(); }
  bool number_float(number_float_t, const string_t&) { return value(); }
  bool string(string_t&) { return value(); }
  bool binary(binary_t&) { return value(); }

  bool start_object(std::size_t) {
    const std::string here = open_value();
    stack_.push_back({false, 0, here});
    return true;
  }
  bool key(string_t& k) {
    Frame& f = stack_.back();
    pending_ = f.pointer + "/" + escape_token(k);
    lines_[pending_] = line_here();
    return true;
  }
  bool end_object() {
    stack_.pop_back();
    return true;
  }
  bool start_array(std::size_t) {
    const std::string here = open_value();
    stack_.push_back({true, 0, here});
    return true;
  }
  bool end_array() {
    stack_.pop_back();
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) { return false; }

 private:
  struct Frame {
    bool array;
    std::size_t index;
    std::string pointer;
  };

  // Line of the last non-blank character the lexer consumed.
  int line_here() const {
    std::size_t pos = static_cast<std::size_t>(*cursor_ - text_.data());
    while (pos > 0 && std::isspace(static_cast<unsigned char>(text_[pos - 1]))) --pos;
    const std::size_t at = pos == 0 ? 0 : pos - 1;
    return 1 + static_cast<int>(std::lower_bound(newlines_.begin(), newlines_.end(), at) - newlines_.begin());
  }

  std::string open_value() {
    if (stack_.empty()) {
      lines_[""] = line_here();
      return "";
    }
    Frame& f = stack_.back();
    if (!f.array) return pending_;
    const std::string p = f.pointer + "/" + std::to_string(f.index++);
    lines_[p] = line_here();
    return p;
  }

  bool value() {
    open_value();
    return true;
  }

  std::string_view text_;
  const char** cursor_;
  LineMap& lines_;
  std::vector<std::size_t> newlines_;
  std::vector<Frame> stack_;
  std::string pending_;
};

std::string type_name(const Json& v) {
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  return v.type_name();
}

bool has_type(const Json& v, const std::string& t) {
  if (t == "null") return v.is_null();
  if (t == "boolean") return v.is_boolean();
  if (t == "string") return v.is_string();
  if (t == "array") return v.is_array();
  if (t == "object") return v.is_object();
  if (t == "number") return v.is_number();
  if (t == "integer") {
    if (v.is_number_integer()) return true;
    if (v.is_number_float()) {
      const double d = v.get<double>();
      return std::isfinite(d) && std::floor(d) == d;
    }
  }
  return false;
}

class Validator {
 public:
  explicit Validator(const SourceMap& source) : source_(source) {}

  void check(Json& v, const Json& schema, const std::string& ptr) const {
    if (schema.contains("type")) {
      const Json& t = schema["type"];
      bool ok = false;
      std::string expected;
      for (const Json& name : t.is_array() ? t : Json::array({t})) {
        ok = ok || has_type(v, name.get<std::string>());
        expected += (expected.empty() ? "" : " or ") + name.get<std::string>();
      }
      if (!ok) fail(ptr, "expected " + expected + ", got " + type_name(v));
      // Integral floats are normalised so that later reads are exact.
      if (v.is_number_float() && t == "integer")
        v = static_cast<std::int64_t>(v.get<double>());
    }
    if (schema.contains("enum")) {
      const Json& e = schema["enum"];
      if (std::find(e.begin(), e.end(), v) == e.end()) fail(ptr, v.dump() + " is not one of " + e.dump());
    }
    if (v.is_number()) {
      const double d = v.get<double>();
      if (!std::isfinite(d)) fail(ptr, "value must be finite");
      if (schema.contains("minimum") && d < schema["minimum"].get<double>())
        fail(ptr, v.dump() + " is below the minimum " + schema["minimum"].dump());
      if (schema.contains("maximum") && d > schema["maximum"].get<double>())
        fail(ptr, v.dump() + " is above the maximum " + schema["maximum"].dump());
      if (schema.contains("exclusiveMinimum") && !(d > schema["exclusiveMinimum"].get<double>()))
        fail(ptr, v.dump() + " must be greater than " + schema["exclusiveMinimum"].dump());
      if (schema.contains("exclusiveMaximum") && !(d < schema["exclusiveMaximum"].get<double>()))
        fail(ptr, v.dump() + " must be less than " + schema["exclusiveMaximum"].dump());
    }
    if (v.is_array()) {
      if (schema.contains("minItems") && v.size() < schema["minItems"].get<std::size_t>())
        fail(ptr, "needs at least " + schema["minItems"].dump() + " items");
      if (schema.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i) check(v[i], schema["items"], ptr + "/" + std::to_string(i));
    }
    if (v.is_object()) {
      const Json empty = Json::object();
      const Json& props = schema.contains("properties") ? schema["properties"] : empty;
      if (schema.value("additionalProperties", true) == false)
        for (const auto& [k, _] : v.items())
          if (!props.contains(k)) {
            std::string known;
            for (const auto& [pk, __] : props.items()) known += (known.empty() ? "" : ", ") + pk;
            fail(ptr + "/" + escape_token(k), "unknown key '" + k + "' (allowed: " + known + ")");
          }
      if (schema.contains("required"))
        for (const Json& r : schema["required"])
          if (!v.contains(r.get<std::string>())) fail(ptr, "missing required key '" + r.get<std::string>() + "'");
      for (const auto& [k, sub] : props.items()) {
        if (!v.contains(k)) {
          if (!sub.contains("default")) continue;
          v[k] = sub["default"];
        }
        check(v[k], sub, ptr + "/" + escape_token(k));
      }
    }
  }

 private:
  [[noreturn]] void fail(const std::string& ptr, const std::string& what) const {
    throw ConfigError(source_.locate(ptr) + ": " + (ptr.empty() ? "/" : ptr) + ": " + what);
  }

  const SourceMap& source_;
};

std::vector<double> numbers(const Json& v) { return v.get<std::vector<double>>(); }

// Kind-specific parameters: applicable keys with their defaults (null: required).
struct KindKeys {
  std::vector<std::pair<std::string, Json>> keys;
};

void fill_kind(Json& obj, const std::string& kind, const KindKeys& spec, const std::vector<std::string>& all,
               const SourceMap& source, const std::string& ptr) {
  for (const std::string& k : all) {
    if (k == "kind" || !obj.contains(k)) continue;
    const bool applies = std::any_of(spec.keys.begin(), spec.keys.end(), [&](const auto& kv) { return kv.first == k; });
    if (!applies)
      throw ConfigError(source.locate(ptr + "/" + k) + ": " + ptr + "/" + k + ": key '" + k +
                        "' does not apply to kind '" + kind + "'");
  }
  for (const auto& [k, def] : spec.keys) {
    if (obj.contains(k)) continue;
    if (def.is_null())
      throw ConfigError(source.locate(ptr) + ": " + ptr + ": kind '" + kind + "' needs key '" + k + "'");
    if (def.is_discarded()) continue;  // optional without default
    obj[k] = def;
  }
}

Json optional_key() { return Json(Json::value_t::discarded); }

[[noreturn]] void fail_at(const SourceMap& source, const std::string& ptr, const std::string& what) {
  throw ConfigError(source.locate(ptr) + ": " + ptr + ": " + what);
}

}  // namespace

std::string_view config_schema_text() { return kSchemaText; }

const Json& config_schema() {
  static const Json schema = Json::parse(kSchemaText);
  return schema;
}

std::string SourceMap::locate(const std::string& pointer) const {
  for (std::string p = pointer;; p = p.substr(0, p.rfind('/'))) {
    if (auto it = overrides.find(p); it != overrides.end()) return it->second;
    if (p.empty()) break;
  }
  for (std::string p = pointer;; p = p.substr(0, p.rfind('/'))) {
    if (auto it = lines.find(p); it != lines.end()) return origin + ":" + std::to_string(it->second);
    if (p.empty()) break;
  }
  return origin;
}

Json parse_json_with_lines(std::string_view text, SourceMap& source) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& err) {
    std::string msg = err.what();
    // "[json.exception.parse_error.101] parse error at line 3, column 5: ..."
    const auto at = msg.find("at line ");
    if (at != std::string::npos) {
      int line = 0;
      int col = 0;
      if (std::sscanf(msg.c_str() + at, "at line %d, column %d", &line, &col) == 2) {
        const auto colon = msg.find(": ", at);
        const std::string rest = colon == std::string::npos ? msg : msg.substr(colon + 2);
        throw ConfigError(source.origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + rest);
      }
    }
    throw ConfigError(source.origin + ": " + msg);
  }
  const char* cursor = text.data();
  LineRecorder rec(text, &cursor, source.lines);
  TrackingIterator first{text.data(), &cursor};
  TrackingIterator last{text.data() + text.size(), nullptr};
  Json::sax_parse(first, last, &rec);
  return doc;
}

void validate_and_fill(Json& doc, const Json& schema, const SourceMap& source) {
  Validator(source).check(doc, schema, "");
}

std::string apply_override(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("--set " + std::string(assignment) + ": expected KEY=VALUE");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }

  std::string ptr;
  Json* node = &doc;
  std::stringstream parts(key);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (part.empty()) throw ConfigError("--set " + std::string(assignment) + ": empty key segment");
    if (node->is_null()) *node = Json::object();
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(part, &used);
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw ConfigError("--set " + std::string(assignment) + ": '" + part + "' is not an array index");
      }
      if (idx > node->size())
        throw ConfigError("--set " + std::string(assignment) + ": index " + part + " is past the end");
      if (idx == node->size()) node->push_back(Json::object());
      node = &(*node)[idx];
    } else if (node->is_object()) {
      node = &(*node)[part];
    } else {
      throw ConfigError("--set " + std::string(assignment) + ": '" + ptr + "' is not an object or array");
    }
    ptr += "/" + escape_token(part);
  }
  *node = value;
  return ptr;
}

RunConfig from_json(Json doc, const SourceMap& source) {
  RunConfig cfg;
  const Json& pj = doc["problem"];

  ProblemSpec& spec = cfg.problem;
  const Json& gj = doc["grid"];
  spec.R = gj["R"].get<double>();
  spec.n = gj["n"].get<int>();
  spec.scheme = gj["scheme"] == "fd2" ? DiffScheme::fd2 : DiffScheme::fd4;
  spec.b = pj["b"].get<double>();
  if (!pj["V0"].is_null()) spec.v0 = pj["V0"].get<double>();

  const std::vector<std::string> potential_keys{"kind", "a0", "value", "radii", "values"};
  Json& vj = doc["problem"]["potential"];
  const std::string vkind = vj["kind"];
  if (vkind == "zigzag") {
    fill_kind(vj, vkind, {{{"a0", 0.0}}}, potential_keys, source, "/problem/potential");
    spec.potential = Potential::zigzag(vj["a0"].get<double>());
  } else if (vkind == "constant") {
    fill_kind(vj, vkind, {{{"value", 1.0}}}, potential_keys, source, "/problem/potential");
    spec.potential = Potential::constant(vj["value"].get<double>());
  } else {
    fill_kind(vj, vkind, {{{"values", Json()}, {"radii", optional_key()}}}, potential_keys, source,
              "/problem/potential");
    const std::vector<double> values = numbers(vj["values"]);
    std::vector<double> radii;
    if (vj.contains("radii")) {
      radii = numbers(vj["radii"]);
    } else {
      const RadialGrid grid = build_grid(spec.R, spec.n, spec.scheme);
      radii.assign(grid.nodes().begin(), grid.nodes().end());
    }
    if (radii.size() != values.size())
      fail_at(source, "/problem/potential/values",
              std::to_string(values.size()) + " values for " + std::to_string(radii.size()) +
                  (vj.contains("radii") ? " radii" : " grid nodes"));
    try {
      spec.potential = Potential::tabulated(RadialTable(radii, values));
    } catch (const ConfigError& err) {
      fail_at(source, "/problem/potential", err.what());
    }
  }

  const std::vector<std::string> term_keys{"kind", "amplitude", "amplitude_radii", "amplitude_values", "c3",
                                           "tau", "coef", "p", "u", "f"};
  std::vector<Term> terms;
  Json& tj = doc["problem"]["nonlinearity"]["terms"];
  for (std::size_t i = 0; i < tj.size(); ++i) {
    Json& t = tj[i];
    const std::string ptr = "/problem/nonlinearity/terms/" + std::to_string(i);
    const std::string kind = t["kind"];
    try {
      if (kind == "kirchhoff-example") {
        const bool table = t.contains("amplitude_radii") || t.contains("amplitude_values");
        if (table && t.contains("amplitude"))
          fail_at(source, ptr, "give either 'amplitude' or 'amplitude_radii'/'amplitude_values', not both");
        if (table) {
          fill_kind(t, kind, {{{"amplitude_radii", Json()}, {"amplitude_values", Json()}}}, term_keys, source, ptr);
          terms.push_back(KirchhoffExampleTerm{
              1.0, RadialTable(numbers(t["amplitude_radii"]), numbers(t["amplitude_values"]))});
        } else {
          fill_kind(t, kind, {{{"amplitude", 1.0}}}, term_keys, source, ptr);
          terms.push_back(KirchhoffExampleTerm{t["amplitude"].get<double>(), {}});
        }
      } else if (kind == "ar-violator") {
        fill_kind(t, kind, {}, term_keys, source, ptr);
        terms.push_back(ArViolatorTerm{});
      } else if (kind == "sublinear-origin") {
        fill_kind(t, kind, {{{"c3", 1.0}, {"tau", 1.0}}}, term_keys, source, ptr);
        terms.push_back(SublinearOriginTerm{t["c3"].get<double>(), t["tau"].get<double>()});
      } else if (kind == "power") {
        fill_kind(t, kind, {{{"coef", 1.0}, {"p", Json()}}}, term_keys, source, ptr);
        terms.push_back(PowerTerm{t["coef"].get<double>(), t["p"].get<double>()});
      } else {
        fill_kind(t, kind, {{{"u", Json()}, {"f", Json()}}}, term_keys, source, ptr);
        terms.push_back(TabulatedTerm(numbers(t["u"]), numbers(t["f"])));
      }
    } catch (const ConfigError& err) {
      const std::string msg = err.what();
      if (msg.rfind(source.origin, 0) == 0 || msg.rfind("--set", 0) == 0) throw;
      fail_at(source, ptr, msg);
    }
  }
  spec.nonlinearity = Nonlinearity(std::move(terms));
  try {
    validate(spec);
  } catch (const ConfigError& err) {
    fail_at(source, "/problem", err.what());
  }

  const Json& sj = doc["solver"];
  SolverConfig& sc = cfg.solver;
  sc.tol_residual = sj["tol_residual"];
  sc.tol_cerami = sj["tol_cerami"];
  sc.max_iters = sj["max_iters"];
  sc.armijo.sigma = sj["armijo_sigma"];
  sc.armijo.shrink = sj["armijo_shrink"];
  sc.path_points = sj["path_points"];
  sc.deform_step = sj["deform_step"];
  sc.distinct_delta = sj["distinct_delta"];
  cfg.truncation_check = sj["truncation_check"];
  cfg.seed = doc["seed"].get<std::uint64_t>();
  sc.seed = cfg.seed;
  try {
    sc.validate();
  } catch (const ConfigError& err) {
    fail_at(source, "/solver", err.what());
  }

  const Json& ej = doc["geometry"];
  GeometryOptions& go = cfg.geometry;
  if (!ej["rho"].is_null()) go.rho = ej["rho"].get<double>();
  go.sphere_samples = ej["sphere_samples"];
  go.t_max = ej["t_max"];
  go.factor = ej["scan_factor"];
  go.t_min = ej["t_min"];
  go.sphere.refine_starts = ej["refine_starts"];
  go.sphere.refine_iters = ej["refine_iters"];
  go.rho_min = ej["rho_min"];
  go.rho_max = ej["rho_max"];
  go.rho_grid = ej["rho_grid"];
  go.seed = cfg.seed;
  if (!(go.rho_min < go.rho_max)) fail_at(source, "/geometry/rho_max", "rho_max must exceed rho_min");

  const Json& cj = doc["checks"];
  for (std::size_t i = 0; i < cj.size(); ++i) {
    const Json& c = cj[i];
    const std::string ptr = "/checks/" + std::to_string(i);
    CheckRequest req;
    req.condition = c["condition"];
    req.samples.range = parse_sign_range(c["range"].get<std::string>());
    req.samples.U = c["U"];
    req.samples.intervals = c["intervals"];
    req.samples.u_min = c["u_min"];
    req.samples.extension = c["extension"];
    if (!(req.samples.u_min < req.samples.U)) fail_at(source, ptr + "/u_min", "u_min must be below U");
    req.r0 = c["r0"];
    req.divergence_factor = c["divergence_factor"];
    req.mu = numbers(c["mu"]);
    if (req.mu.empty()) fail_at(source, ptr + "/mu", "needs at least one exponent");
    req.v1.d0 = c["d0"];
    req.v1.levels = numbers(c["levels"]);
    req.v1.y_radii = numbers(c["y_radii"]);
    req.v1.samples = c["samples"].get<std::uint64_t>();
    req.v1.seed = cfg.seed;
    if (req.condition == "V1" && req.v1.y_radii.size() < 3)
      fail_at(source, ptr + "/y_radii", "V1 needs at least three radii");
    if (req.condition == "V1" && req.v1.levels.empty()) fail_at(source, ptr + "/levels", "V1 needs a level");
    cfg.checks.push_back(std::move(req));
  }

  cfg.output_dir = doc["output_dir"];
  cfg.effective = std::move(doc);
  return cfg;
}

RunConfig load_config(std::string_view text, std::string_view origin, const std::vector<std::string>& overrides,
                      std::optional<std::uint64_t> seed, std::optional<std::string> output_dir) {
  SourceMap source;
  source.origin = std::string(origin);
  Json doc = parse_json_with_lines(text, source);
  if (!doc.is_object()) throw ConfigError(source.locate("") + ": top level must be an object");
  for (const std::string& o : overrides) {
    const std::string ptr = apply_override(doc, o);
    source.overrides[ptr] = "--set " + o;
  }
  if (seed) {
    doc["seed"] = *seed;
    source.overrides["/seed"] = "--seed";
  }
  if (output_dir) {
    doc["output_dir"] = *output_dir;
    source.overrides["/output_dir"] = "--output";
  }
  validate_and_fill(doc, config_schema(), source);
  return from_json(std::move(doc), source);
}

RunConfig load_config_file(const std::string& path, const std::vector<std::string>& overrides,
                           std::optional<std::uint64_t> seed, std::optional<std::string> output_dir) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_config(text, path, overrides, seed, output_dir);
}

}  // namespace kirchhoff
