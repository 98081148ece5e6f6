#include "ecla/report.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ecla {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
T parse_num(std::string_view s, std::string_view key) {
  T v{};
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::invalid_argument("report: bad value for " + std::string(key) + ": " + std::string(s));
  return v;
}

bool parse_bool(std::string_view s) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw std::invalid_argument("report: bad boolean " + std::string(s));
}

void set_call_field(TrsmCallStats& c, std::string_view k, std::string_view v) {
  if (k == "variant") c.variant = v;
  else if (k == "target") c.target = v;
  else if (k == "m") c.m = parse_num<std::size_t>(v, k);
  else if (k == "n") c.n = parse_num<std::size_t>(v, k);
  else if (k == "ell") c.ell = parse_num<std::size_t>(v, k);
  else if (k == "epsilon") c.epsilon = parse_num<double>(v, k);
  else if (k == "lambda") c.lambda = parse_num<unsigned>(v, k);
  else if (k == "field_degree") c.field_degree = parse_num<unsigned>(v, k);
  else if (k == "extended") c.extended = parse_bool(v);
  else if (k == "iterations") c.iterations = parse_num<std::size_t>(v, k);
  else if (k == "rounds") c.rounds = parse_num<std::size_t>(v, k);
  else if (k == "initial_columns") c.initial_columns = parse_num<std::size_t>(v, k);
  else if (k == "corrected") c.corrected = parse_num<std::size_t>(v, k);
  else if (k == "final_k") c.final_k = parse_num<std::size_t>(v, k);
  else if (k == "freivalds_misses") c.freivalds_misses = parse_num<std::size_t>(v, k);
  else if (k == "seed") c.seed = parse_num<std::uint64_t>(v, k);
  else throw std::invalid_argument("report: unknown call field " + std::string(k));
}

}  // namespace

std::size_t CorrectionReport::total_iterations() const {
  std::size_t t = 0;
  for (const auto& c : calls) t += c.iterations;
  return t;
}

std::size_t CorrectionReport::max_rounds() const {
  std::size_t t = 0;
  for (const auto& c : calls) t = std::max(t, c.rounds);
  return t;
}

bool CorrectionReport::any_extension() const {
  return std::any_of(calls.begin(), calls.end(), [](const TrsmCallStats& c) { return c.extended; });
}

void CorrectionReport::absorb(const CorrectionReport& o) {
  calls.insert(calls.end(), o.calls.begin(), o.calls.end());
  corrections.insert(corrections.end(), o.corrections.begin(), o.corrections.end());
  notes.insert(notes.end(), o.notes.begin(), o.notes.end());
  epsilon_spent += o.epsilon_spent;
}

std::string CorrectionReport::serialize() const {
  std::ostringstream os;
  os << "operation=" << operation << '\n';
  os << "seed=" << seed << '\n';
  os << "epsilon=" << fmt_double(epsilon) << '\n';
  os << "epsilon_spent=" << fmt_double(epsilon_spent) << '\n';
  if (rank) os << "rank=" << *rank << '\n';
  os << "seconds=" << fmt_double(seconds) << '\n';
  os << "verification=" << verification << '\n';
  os << "corrected=" << corrections.size() << '\n';
  os << "trsm_calls=" << calls.size() << '\n';
  os << "total_iterations=" << total_iterations() << '\n';
  os << "field_extended=" << (any_extension() ? 1 : 0) << '\n';
  for (std::size_t i = 0; i < calls.size(); ++i) {
    const auto& c = calls[i];
    const std::string p = "call." + std::to_string(i) + ".";
    os << p << "variant=" << c.variant << '\n'
       << p << "target=" << c.target << '\n'
       << p << "m=" << c.m << '\n'
       << p << "n=" << c.n << '\n'
       << p << "ell=" << c.ell << '\n'
       << p << "epsilon=" << fmt_double(c.epsilon) << '\n'
       << p << "lambda=" << c.lambda << '\n'
       << p << "field_degree=" << c.field_degree << '\n'
       << p << "extended=" << (c.extended ? 1 : 0) << '\n'
       << p << "iterations=" << c.iterations << '\n'
       << p << "rounds=" << c.rounds << '\n'
       << p << "initial_columns=" << c.initial_columns << '\n'
       << p << "corrected=" << c.corrected << '\n'
       << p << "final_k=" << c.final_k << '\n'
       << p << "freivalds_misses=" << c.freivalds_misses << '\n'
       << p << "seed=" << c.seed << '\n';
  }
  for (std::size_t i = 0; i < corrections.size(); ++i) {
    const auto& c = corrections[i];
    os << "correction." << i << '=' << c.target << ' ' << c.row << ' ' << c.col << ' ' << c.old_value << ' '
       << c.new_value << '\n';
  }
  for (std::size_t i = 0; i < notes.size(); ++i) os << "note." << i << '=' << notes[i] << '\n';
  return os.str();
}

CorrectionReport CorrectionReport::parse(std::string_view text) {
  CorrectionReport r;
  std::map<std::size_t, TrsmCallStats> calls;
  std::map<std::size_t, Correction> corr;
  std::map<std::size_t, std::string> notes;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("report: missing '=' in " + std::string(line));
    std::string_view key = line.substr(0, eq), val = line.substr(eq + 1);

    if (key.starts_with("call.")) {
      std::string_view rest = key.substr(5);
      const std::size_t dot = rest.find('.');
      if (dot == std::string_view::npos) throw std::invalid_argument("report: bad key " + std::string(key));
      set_call_field(calls[parse_num<std::size_t>(rest.substr(0, dot), key)], rest.substr(dot + 1), val);
    } else if (key.starts_with("correction.")) {
      Correction c;
      std::istringstream is{std::string(val)};
      if (!(is >> c.target >> c.row >> c.col >> c.old_value >> c.new_value))
        throw std::invalid_argument("report: bad correction line " + std::string(line));
      corr[parse_num<std::size_t>(key.substr(11), key)] = c;
    } else if (key.starts_with("note.")) {
      notes[parse_num<std::size_t>(key.substr(5), key)] = std::string(val);
    } else if (key == "operation") {
      r.operation = val;
    } else if (key == "seed") {
      r.seed = parse_num<std::uint64_t>(val, key);
    } else if (key == "epsilon") {
      r.epsilon = parse_num<double>(val, key);
    } else if (key == "epsilon_spent") {
      r.epsilon_spent = parse_num<double>(val, key);
    } else if (key == "rank") {
      r.rank = parse_num<std::size_t>(val, key);
    } else if (key == "seconds") {
      r.seconds = parse_num<double>(val, key);
    } else if (key == "verification") {
      r.verification = val;
    }
    // Derived totals (corrected, trsm_calls, ...) are recomputed, not stored.
  }
  for (auto& [i, c] : calls) r.calls.push_back(std::move(c));
  for (auto& [i, c] : corr) r.corrections.push_back(std::move(c));
  for (auto& [i, n] : notes) r.notes.push_back(std::move(n));
  return r;
}

}  // namespace ecla
