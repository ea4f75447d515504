#include "accrue/model_io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "accrue/csv.hpp"

namespace accrue {

namespace {

constexpr const char* kMagic = "accrue-calib-model v1";

class LineReader {
 public:
  LineReader(std::istream& in, const std::string& path) : in_(in), path_(path) {}

  std::string next(const std::string& expected_key) {
    std::string line;
    if (!std::getline(in_, line)) {
      fail("unexpected end of file, expected '" + expected_key + "'");
    }
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t sp = line.find(' ');
    const std::string key = line.substr(0, sp);
    if (key != expected_key) {
      fail("expected field '" + expected_key + "', got '" + key + "'");
    }
    return sp == std::string::npos ? std::string() : line.substr(sp + 1);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error(path_ + ":" + std::to_string(line_no_ + 1) + ": " +
                             what);
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::string path_;
  std::size_t line_no_ = 0;
};

double parse_one_double(const std::string& s, const LineReader& r) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    r.fail("bad numeric value '" + s + "'");
  }
  return v;
}

std::vector<double> parse_doubles(const std::string& s, std::size_t expected,
                                  const LineReader& r) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(parse_one_double(tok, r));
  if (out.size() != expected) {
    r.fail("expected " + std::to_string(expected) + " values, got " +
           std::to_string(out.size()));
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

void save_model(const std::string& path, const CalibrationModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << kMagic << '\n';
  out << "family " << family_name(model.family) << '\n';
  out << "beta_star " << format_double(model.beta_star.value()) << '\n';
  out << "seed " << model.seed << '\n';
  out << "test_loss " << format_double(model.test_loss) << '\n';
  out << "d_in " << model.weights.d_in << '\n';
  out << "n_hidden " << model.weights.n_hidden << '\n';
  out << "n_out " << model.weights.n_out << '\n';
  out << "w1 " << join(model.weights.w1) << '\n';
  out << "b1 " << join(model.weights.b1) << '\n';
  out << "w2 " << join(model.weights.w2) << '\n';
  out << "b2 " << join(model.weights.b2) << '\n';
  out << "mean " << join(model.standardizer.mean) << '\n';
  out << "stdev " << join(model.standardizer.stdev) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

CalibrationModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
  LineReader r(in, path);

  std::string magic;
  if (!std::getline(in, magic)) throw std::runtime_error(path + ": empty file");
  if (!magic.empty() && magic.back() == '\r') magic.pop_back();
  if (magic != kMagic) {
    throw std::runtime_error(path + ":1: not an accrue-calib v1 model file");
  }

  CalibrationModel m;
  m.family = family_from_name(r.next("family"));
  m.beta_star = BetaWeight(parse_one_double(r.next("beta_star"), r));
  {
    const std::string s = r.next("seed");
    char* end = nullptr;
    m.seed = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') r.fail("bad seed '" + s + "'");
  }
  m.test_loss = parse_one_double(r.next("test_loss"), r);

  const auto parse_dim = [&r](const std::string& s) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || v < 1 || v > 1 << 20) {
      r.fail("bad dimension '" + s + "'");
    }
    return static_cast<int>(v);
  };
  m.weights.d_in = parse_dim(r.next("d_in"));
  m.weights.n_hidden = parse_dim(r.next("n_hidden"));
  m.weights.n_out = parse_dim(r.next("n_out"));
  if (m.weights.n_out != family_arity(m.family)) {
    r.fail("n_out does not match family arity");
  }

  const std::size_t h = static_cast<std::size_t>(m.weights.n_hidden);
  const std::size_t d = static_cast<std::size_t>(m.weights.d_in);
  const std::size_t k = static_cast<std::size_t>(m.weights.n_out);
  m.weights.w1 = parse_doubles(r.next("w1"), h * d, r);
  m.weights.b1 = parse_doubles(r.next("b1"), h, r);
  m.weights.w2 = parse_doubles(r.next("w2"), k * h, r);
  m.weights.b2 = parse_doubles(r.next("b2"), k, r);
  m.standardizer.mean = parse_doubles(r.next("mean"), d, r);
  m.standardizer.stdev = parse_doubles(r.next("stdev"), d, r);
  for (double s : m.standardizer.stdev) {
    if (!(s > 0.0)) r.fail("stdev entries must be positive");
  }
  return m;
}

}  // namespace accrue
