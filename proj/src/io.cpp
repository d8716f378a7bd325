#include "specbound/io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace specbound {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string spectrum_to_json(const Spectrum& s) {
  json j;
  j["label"] = s.label;
  j["dimension"] = s.dimension ? json(*s.dimension) : json(nullptr);
  j["volume"] = s.volume ? json(*s.volume) : json(nullptr);
  if (s.constants) {
    j["constants"] = {{"alpha", s.constants->alpha},
                      {"beta", s.constants->beta},
                      {"gamma", s.constants->gamma}};
  } else {
    j["constants"] = nullptr;
  }
  std::vector<double> vals(s.values.data(), s.values.data() + s.size());
  j["eigenvalues"] = vals;
  return j.dump(2) + "\n";
}

Spectrum spectrum_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("invalid spectrum JSON: ") + e.what());
  }
  if (!j.is_object()) throw PreconditionError("invalid spectrum JSON: top level must be an object");
  if (!j.contains("eigenvalues") || !j["eigenvalues"].is_array()) {
    throw PreconditionError("invalid spectrum JSON: missing \"eigenvalues\" array");
  }
  const auto& arr = j["eigenvalues"];
  Vector values(static_cast<Eigen::Index>(arr.size()));
  Eigen::Index i = 0;
  for (const auto& v : arr) {
    if (!v.is_number()) {
      throw PreconditionError("invalid spectrum JSON: eigenvalue entry " + std::to_string(i) +
                              " is not a finite number");
    }
    values(i++) = v.get<double>();
  }

  Spectrum s;
  s.values = std::move(values);
  if (j.contains("label") && j["label"].is_string()) s.label = j["label"].get<std::string>();
  if (j.contains("dimension") && !j["dimension"].is_null()) {
    if (!j["dimension"].is_number_integer()) {
      throw PreconditionError("invalid spectrum JSON: dimension must be an integer or null");
    }
    s.dimension = j["dimension"].get<int>();
  }
  if (j.contains("volume") && !j["volume"].is_null()) {
    if (!j["volume"].is_number()) {
      throw PreconditionError("invalid spectrum JSON: volume must be a number or null");
    }
    s.volume = j["volume"].get<double>();
  }
  if (j.contains("constants") && !j["constants"].is_null()) {
    const auto& c = j["constants"];
    if (!c.is_object() || !c.contains("alpha") || !c.contains("beta") || !c.contains("gamma") ||
        !c["alpha"].is_number() || !c["beta"].is_number() || !c["gamma"].is_number()) {
      throw PreconditionError(
          "invalid spectrum JSON: constants must be {\"alpha\",\"beta\",\"gamma\"} numbers");
    }
    s.constants = CommutatorConstants{c["alpha"].get<double>(), c["beta"].get<double>(),
                                      c["gamma"].get<double>()};
  }
  s.validate();
  return s;
}

void save_spectrum(const Spectrum& s, const std::string& path) {
  write_text_file(path, spectrum_to_json(s));
}

Spectrum load_spectrum(const std::string& path) { return spectrum_from_json(read_text_file(path)); }

namespace {

json context_to_json(const ReportContext& c) {
  json j = json::object();
  if (c.n) j["n"] = *c.n;
  if (c.p) j["p"] = *c.p;
  if (c.q) j["q"] = *c.q;
  if (c.z) j["z"] = *c.z;
  if (c.t) j["t"] = *c.t;
  if (c.k) j["k"] = *c.k;
  if (c.rho) j["rho"] = *c.rho;
  return j;
}

std::string csv_cell_int(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string();
}

// p and q columns double as rho and k carriers so monotone and ratio laws
// fit the flat schema.
std::string csv_p_cell(const ReportContext& c) {
  if (c.p) return format_double(*c.p);
  if (c.rho) return format_double(*c.rho);
  return {};
}

std::string csv_q_cell(const ReportContext& c) {
  if (c.q) return format_double(*c.q);
  if (c.k) return std::to_string(*c.k);
  return {};
}

std::string csv_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

void append_csv_row(std::ostringstream& os, const std::string& law, const ReportContext& ctx,
                    double lhs, double rhs, double slack, bool verdict) {
  os << law << ',' << csv_cell_int(ctx.n) << ',' << csv_p_cell(ctx) << ',' << csv_q_cell(ctx)
     << ',' << csv_cell(ctx.z) << ',' << csv_cell(ctx.t) << ',' << format_double(lhs) << ','
     << format_double(rhs) << ',' << format_double(slack) << ',' << (verdict ? "pass" : "fail")
     << '\n';
}

}  // namespace

std::string reports_to_json(const std::vector<InequalityReport>& checks,
                            const std::vector<MonotonicityReport>& monotone) {
  json arr = json::array();
  for (const auto& r : checks) {
    json j;
    j["law"] = r.law;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["slack"] = r.slack;
    j["tolerance"] = r.tolerance;
    j["verdict"] = r.verdict;
    j["context"] = context_to_json(r.context);
    if (!r.note.empty()) j["note"] = r.note;
    arr.push_back(std::move(j));
  }
  for (const auto& r : monotone) {
    json j;
    j["law"] = r.law;
    j["grid"] = std::vector<double>(r.grid.data(), r.grid.data() + r.grid.size());
    j["ratio_values"] =
        std::vector<double>(r.ratio_values.data(), r.ratio_values.data() + r.ratio_values.size());
    j["max_violation"] = r.max_violation;
    j["tolerance"] = r.tolerance;
    j["verdict"] = r.verdict;
    j["context"] = context_to_json(r.context);
    if (!r.note.empty()) j["note"] = r.note;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string reports_to_csv(const std::vector<InequalityReport>& checks,
                           const std::vector<MonotonicityReport>& monotone) {
  std::ostringstream os;
  os << "law,n,p,q,z,t,lhs,rhs,slack,verdict\n";
  for (const auto& r : checks) {
    append_csv_row(os, r.law, r.context, r.lhs, r.rhs, r.slack, r.verdict);
  }
  for (const auto& r : monotone) {
    append_csv_row(os, r.law, r.context, r.max_violation, 0.0, -r.max_violation, r.verdict);
  }
  return os.str();
}

std::string monotonicity_to_tsv(const MonotonicityReport& r) {
  std::ostringstream os;
  os << "# law: " << r.law << '\n';
  os << "# max_violation: " << format_double(r.max_violation) << "  tolerance: "
     << format_double(r.tolerance) << "  verdict: " << (r.verdict ? "pass" : "fail") << '\n';
  if (!r.note.empty()) os << "# note: " << r.note << '\n';
  for (Eigen::Index i = 0; i < r.grid.size(); ++i) {
    os << format_double(r.grid(i)) << '\t' << format_double(r.ratio_values(i)) << '\n';
  }
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file for reading: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw Error("failed writing file: " + path);
}

}  // namespace specbound
