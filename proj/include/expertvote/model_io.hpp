#pragma once

// Text model files.
//
// Grammar, line oriented; '#' starts a comment, blank lines are skipped:
//
//   kind two_density|discrete_family      (first directive in the file)
//   theta <value>                         (discrete_family, ascending)
//   split <n>                             (discrete_family: the first n
//                                          thetas form the lower side)
//   outcome <label> t=<value> w=<value> p=<d0>,<d1>[,...]
//
// two_density rows carry exactly two densities, the upper hypothesis first;
// discrete_family rows carry one density per theta line.  Values may be
// integers, fractions like 1/6, or decimals.  The model is kept in exact
// rational arithmetic when every value parses exactly and the densities sum
// to 1 exactly; otherwise it is built in double precision (mass checked to
// 1e-12).

#include <expertvote/rational.hpp>
#include <expertvote/simple_choice.hpp>
#include <expertvote/stable.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace expertvote::model_io {

enum class ModelKind { two_density, discrete_family };
enum class NumericMode { rational, floating };

inline const char* to_string(ModelKind k) {
  return k == ModelKind::two_density ? "two_density" : "discrete_family";
}
inline const char* to_string(NumericMode m) {
  return m == NumericMode::rational ? "rational" : "float";
}

struct LoadedModel {
  ModelKind kind = ModelKind::two_density;
  NumericMode mode = NumericMode::rational;
  std::optional<simple::TwoDensityModel<Rat>> two_density_rational;
  std::optional<simple::TwoDensityModel<double>> two_density_float;
  std::optional<stable::DiscreteFamilyModel<Rat>> family_rational;
  std::optional<stable::DiscreteFamilyModel<double>> family_float;

  bool rational() const { return mode == NumericMode::rational; }
};

namespace detail {

inline std::invalid_argument at_line(int line, const std::string& what) {
  return std::invalid_argument("model file line " + std::to_string(line) +
                               ": " + what);
}

struct RawOutcome {
  std::string label;
  std::string t, w;
  std::vector<std::string> ps;
  int line = 0;
};

struct RawModel {
  std::optional<ModelKind> kind;
  std::vector<std::string> thetas;
  std::vector<int> theta_lines;
  std::optional<long> split;
  int split_line = 0;
  std::vector<RawOutcome> outcomes;
};

template <class R>
R parse_scalar(const std::string& s, int line) {
  const auto r = parse_rational(s);
  if constexpr (is_exact_scalar_v<R>) {
    if (!r) throw at_line(line, "cannot parse value '" + s + "'");
    return *r;
  } else {
    if (r) return to_double(*r);
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v))
        throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw at_line(line, "cannot parse value '" + s + "'");
    }
  }
}

inline RawModel read_raw(std::istream& in) {
  RawModel raw;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;

    if (head == "kind") {
      if (raw.kind) throw at_line(lineno, "duplicate kind directive");
      if (!raw.thetas.empty() || raw.split || !raw.outcomes.empty())
        throw at_line(lineno, "kind must be the first directive");
      std::string k;
      if (!(ls >> k)) throw at_line(lineno, "kind needs a value");
      if (k == "two_density")
        raw.kind = ModelKind::two_density;
      else if (k == "discrete_family")
        raw.kind = ModelKind::discrete_family;
      else
        throw at_line(lineno, "unknown kind '" + k + "'");
    } else if (head == "theta") {
      std::string v;
      if (!(ls >> v)) throw at_line(lineno, "theta needs a value");
      raw.thetas.push_back(v);
      raw.theta_lines.push_back(lineno);
    } else if (head == "split") {
      if (raw.split) throw at_line(lineno, "duplicate split directive");
      std::string v;
      if (!(ls >> v)) throw at_line(lineno, "split needs a count");
      try {
        std::size_t used = 0;
        raw.split = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        throw at_line(lineno, "cannot parse split count '" + v + "'");
      }
      raw.split_line = lineno;
    } else if (head == "outcome") {
      RawOutcome ro;
      ro.line = lineno;
      if (!(ls >> ro.label)) throw at_line(lineno, "outcome needs a label");
      std::string tok;
      while (ls >> tok) {
        if (tok.rfind("t=", 0) == 0) {
          ro.t = tok.substr(2);
        } else if (tok.rfind("w=", 0) == 0) {
          ro.w = tok.substr(2);
        } else if (tok.rfind("p=", 0) == 0) {
          std::string list = tok.substr(2);
          std::size_t pos = 0;
          while (pos <= list.size()) {
            const auto comma = list.find(',', pos);
            const auto end = comma == std::string::npos ? list.size() : comma;
            ro.ps.push_back(list.substr(pos, end - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
          }
        } else {
          throw at_line(lineno, "unknown outcome field '" + tok + "'");
        }
      }
      if (ro.t.empty()) throw at_line(lineno, "outcome is missing t=");
      if (ro.w.empty()) throw at_line(lineno, "outcome is missing w=");
      if (ro.ps.empty()) throw at_line(lineno, "outcome is missing p=");
      raw.outcomes.push_back(std::move(ro));
    } else {
      throw at_line(lineno, "unknown directive '" + head + "'");
    }
    std::string extra;
    if (ls >> extra) throw at_line(lineno, "unexpected token '" + extra + "'");
  }
  if (!raw.kind) throw std::invalid_argument("model file: missing kind directive");
  if (raw.outcomes.empty())
    throw std::invalid_argument("model file: no outcome rows");
  if (*raw.kind == ModelKind::two_density) {
    if (!raw.thetas.empty())
      throw at_line(raw.theta_lines.front(),
                    "theta directives belong to discrete_family models");
    if (raw.split)
      throw at_line(raw.split_line,
                    "split belongs to discrete_family models");
  } else {
    if (raw.thetas.size() < 2)
      throw std::invalid_argument(
          "model file: discrete_family needs at least two theta directives");
    if (!raw.split)
      throw std::invalid_argument(
          "model file: discrete_family needs a split directive");
    if (*raw.split < 0)
      throw at_line(raw.split_line, "split count cannot be negative");
  }
  return raw;
}

template <class R>
simple::TwoDensityModel<R> build_two_density(const RawModel& raw) {
  simple::TwoDensityModel<R> m;
  for (const auto& ro : raw.outcomes) {
    if (ro.ps.size() != 2)
      throw at_line(ro.line, "two_density rows need p=<p0>,<p1>");
    m.outcomes.push_back({ro.label, parse_scalar<R>(ro.t, ro.line),
                          parse_scalar<R>(ro.w, ro.line),
                          parse_scalar<R>(ro.ps[0], ro.line),
                          parse_scalar<R>(ro.ps[1], ro.line)});
  }
  m.validate();
  return m;
}

template <class R>
stable::DiscreteFamilyModel<R> build_family(const RawModel& raw) {
  stable::DiscreteFamilyModel<R> m;
  for (std::size_t j = 0; j < raw.thetas.size(); ++j)
    m.thetas.push_back(parse_scalar<R>(raw.thetas[j], raw.theta_lines[j]));
  m.split = static_cast<std::size_t>(*raw.split);
  m.densities.assign(raw.thetas.size(), {});
  for (const auto& ro : raw.outcomes) {
    if (ro.ps.size() != raw.thetas.size())
      throw at_line(ro.line, "outcome needs one density per theta");
    m.outcomes.push_back({ro.label, parse_scalar<R>(ro.t, ro.line),
                          parse_scalar<R>(ro.w, ro.line)});
    for (std::size_t j = 0; j < ro.ps.size(); ++j)
      m.densities[j].push_back(parse_scalar<R>(ro.ps[j], ro.line));
  }
  m.validate();
  return m;
}

// True when every density row sums to 1 exactly in rational arithmetic.
inline bool exact_mass(const RawModel& raw) {
  const std::size_t rows =
      *raw.kind == ModelKind::two_density ? 2 : raw.thetas.size();
  for (std::size_t j = 0; j < rows; ++j) {
    Rat total = 0;
    for (const auto& ro : raw.outcomes) {
      if (ro.ps.size() <= j) return true;  // row shape errors surface later
      const auto p = parse_rational(ro.ps[j]);
      const auto w = parse_rational(ro.w);
      if (!p || !w) return false;
      total += Rat(*w * *p);
    }
    if (total != 1) return false;
  }
  for (const auto& th : raw.thetas)
    if (!parse_rational(th)) return false;
  for (const auto& ro : raw.outcomes)
    if (!parse_rational(ro.t)) return false;
  return true;
}

}  // namespace detail

inline LoadedModel parse_model(std::istream& in) {
  const auto raw = detail::read_raw(in);
  LoadedModel lm;
  lm.kind = *raw.kind;
  lm.mode = detail::exact_mass(raw) ? NumericMode::rational
                                    : NumericMode::floating;
  if (lm.kind == ModelKind::two_density) {
    if (lm.rational())
      lm.two_density_rational = detail::build_two_density<Rat>(raw);
    else
      lm.two_density_float = detail::build_two_density<double>(raw);
  } else {
    if (lm.rational())
      lm.family_rational = detail::build_family<Rat>(raw);
    else
      lm.family_float = detail::build_family<double>(raw);
  }
  return lm;
}

inline LoadedModel parse_model(const std::string& text) {
  std::istringstream in(text);
  return parse_model(in);
}

inline LoadedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model file: " + path);
  return parse_model(in);
}

}  // namespace expertvote::model_io
