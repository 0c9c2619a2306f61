// Command-line surface: loads model files, runs vote/rule/distribution
// computations, and hosts the self-check harness.  Output is a flat
// key = value text document by default, or a structured JSON document with
// --json.  Exit codes: 0 success, 1 failed check suite, 2 input or
// validation error, 3 numeric-domain error.

#include <CLI11.hpp>
#include <json.hpp>

#include <expertvote/bolshev.hpp>
#include <expertvote/check.hpp>
#include <expertvote/compatible.hpp>
#include <expertvote/ghost.hpp>
#include <expertvote/model_io.hpp>
#include <expertvote/rational.hpp>
#include <expertvote/simple_choice.hpp>
#include <expertvote/stable.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ev = expertvote;
using ordered_json = nlohmann::ordered_json;

namespace {

// One output entry; rationals carry both the exact fraction and a decimal.
struct Entry {
  std::string key;
  std::variant<std::string, long long, double, ev::Rat, bool> value;
};

class ResultDoc {
 public:
  explicit ResultDoc(std::string command) : command_(std::move(command)) {}

  void input(std::string key, std::string v) { inputs_.push_back({std::move(key), std::move(v)}); }
  void input_int(std::string key, long long v) { inputs_.push_back({std::move(key), v}); }
  void result(std::string key, std::string v) { results_.push_back({std::move(key), std::move(v)}); }
  void result_int(std::string key, long long v) { results_.push_back({std::move(key), v}); }
  void result_bool(std::string key, bool v) { results_.push_back({std::move(key), v}); }
  void result_double(std::string key, double v) { results_.push_back({std::move(key), v}); }
  void result_rational(std::string key, ev::Rat v) { results_.push_back({std::move(key), std::move(v)}); }
  void mode(bool rational) { rational_ = rational; }

  // A probability in either arithmetic, under one key.
  template <class R>
  void result_scalar(const std::string& key, const R& v) {
    if constexpr (ev::is_exact_scalar_v<R>)
      result_rational(key, v);
    else
      result_double(key, v);
  }

  std::string render_text() const {
    std::string out = "command = " + command_ + "\n";
    for (const auto& e : inputs_) out += line(e);
    out += "numeric_mode = " + std::string(rational_ ? "rational" : "float") + "\n";
    for (const auto& e : results_) out += line(e);
    return out;
  }

  std::string render_json() const {
    ordered_json doc;
    doc["command"] = command_;
    ordered_json in = ordered_json::object();
    for (const auto& e : inputs_) in[e.key] = json_value(e);
    doc["inputs"] = in;
    doc["numeric_mode"] = rational_ ? "rational" : "float";
    ordered_json res = ordered_json::object();
    for (const auto& e : results_) res[e.key] = json_value(e);
    doc["result"] = res;
    return doc.dump(2) + "\n";
  }

 private:
  static std::string line(const Entry& e) {
    return e.key + " = " + std::visit(Text{}, e.value) + "\n";
  }

  struct Text {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return ev::decimal_string(v); }
    std::string operator()(const ev::Rat& v) const {
      return ev::fraction_string(v) + " (" + ev::decimal_string(v) + ")";
    }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
  };

  static ordered_json json_value(const Entry& e) {
    if (const auto* r = std::get_if<ev::Rat>(&e.value))
      return ordered_json{{"fraction", ev::fraction_string(*r)},
                          {"value", ev::to_double(*r)}};
    if (const auto* s = std::get_if<std::string>(&e.value)) return *s;
    if (const auto* i = std::get_if<long long>(&e.value)) return *i;
    if (const auto* d = std::get_if<double>(&e.value)) return *d;
    return std::get<bool>(e.value);
  }

  std::string command_;
  std::vector<Entry> inputs_, results_;
  bool rational_ = false;
};

// Numeric flags arrive as text so fractions stay exact in rational mode.
struct NumArg {
  std::string text;

  bool present() const { return !text.empty(); }

  ev::Rat rat(const char* flag) const {
    const auto r = ev::parse_rational(text);
    if (!r)
      throw std::invalid_argument(std::string(flag) + ": cannot parse '" + text + "'");
    return *r;
  }

  double num(const char* flag) const {
    if (const auto r = ev::parse_rational(text)) return ev::to_double(*r);
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used == text.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(std::string(flag) + ": cannot parse '" + text + "'");
  }
};

struct Opts {
  std::string model, outcome, family, query, suite = "all";
  NumArg theta, lambda, alpha0, alpha1, t, u, theta_f, theta1, theta2;
  NumArg median, pull, spread;
  NumArg a, m, p, q;
  long n = 1, n1 = 0, n2 = 0, x1 = 0, x2 = 0;
  std::uint64_t seed = 0;
  bool json = false;
};

ev::model_io::LoadedModel load(const Opts& o, ev::model_io::ModelKind want,
                               const char* cmd) {
  if (o.model.empty())
    throw std::invalid_argument(std::string(cmd) + " needs --model");
  auto lm = ev::model_io::load_model(o.model);
  if (lm.kind != want)
    throw std::invalid_argument(std::string(cmd) + " needs a " +
                                ev::model_io::to_string(want) + " model");
  return lm;
}

int parse_hypothesis_index(const NumArg& theta) {
  if (theta.text == "0") return 0;
  if (theta.text == "1") return 1;
  throw std::invalid_argument("--theta must be 0 or 1 for a two-density model");
}

ev::compat::FamilyDescriptor make_family(const Opts& o) {
  using FD = ev::compat::FamilyDescriptor;
  if (o.family.empty()) throw std::invalid_argument("missing --family");
  const auto num_or = [](const NumArg& arg, const char* flag, double dflt) {
    return arg.present() ? arg.num(flag) : dflt;
  };
  if (o.family == "normal_location")
    return FD::normal_location(num_or(o.a, "--a", 1.0));
  if (o.family == "uniform_location") return FD::uniform_location();
  if (o.family == "uniform_scale") return FD::uniform_scale();
  if (o.family == "normal_scale")
    return FD::normal_scale(num_or(o.m, "--m", 1.0));
  if (o.family == "gamma_scale") return FD::gamma_scale(num_or(o.p, "--p", 1.0));
  if (o.family == "poisson") return FD::poisson(o.n);
  if (o.family == "binomial") return FD::binomial(o.n);
  if (o.family == "noncentral_beta")
    return FD::noncentral_beta(num_or(o.p, "--p", 1.0), num_or(o.q, "--q", 1.0));
  throw std::invalid_argument("unknown family '" + o.family + "'");
}

void echo_family(const Opts& o, ResultDoc& doc) {
  doc.input("family", o.family);
  if (o.a.present()) doc.input("a", o.a.text);
  if (o.m.present()) doc.input("m", o.m.text);
  if (o.p.present()) doc.input("p", o.p.text);
  if (o.q.present()) doc.input("q", o.q.text);
  if (o.family == "poisson" || o.family == "binomial") doc.input_int("n", o.n);
}

// --query cdf:<x> | quantile:<p> | interval:<lo>,<hi>
void run_query(const ev::compat::ParamDistribution& dist, const std::string& query,
               ResultDoc& doc) {
  const auto colon = query.find(':');
  const std::string op = query.substr(0, colon == std::string::npos ? query.size() : colon);
  const std::string rest = colon == std::string::npos ? "" : query.substr(colon + 1);
  NumArg arg{rest};
  doc.input("query", query);
  if (op == "cdf") {
    doc.result_double("cdf", dist.cdf(arg.num("--query cdf")));
  } else if (op == "quantile") {
    const double prob = arg.num("--query quantile");
    if (!(prob >= 0 && prob <= 1))
      throw std::invalid_argument("--query quantile needs a probability in [0, 1]");
    doc.result_double("quantile", dist.quantile(prob));
  } else if (op == "interval") {
    const auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("--query interval needs <lo>,<hi>");
    NumArg lo{rest.substr(0, comma)}, hi{rest.substr(comma + 1)};
    doc.result_double("interval_prob",
                      dist.interval_prob({lo.num("--query interval"),
                                          hi.num("--query interval"), true, true}));
  } else {
    throw std::invalid_argument("unknown query '" + query + "'");
  }
}

void summarize(const ev::compat::ParamDistribution& dist, ResultDoc& doc) {
  doc.result_int("atoms", static_cast<long long>(dist.atoms.size()));
  for (std::size_t i = 0; i < dist.atoms.size(); ++i) {
    const auto tag = "atom_" + std::to_string(i);
    doc.result_double(tag + "_location", dist.atoms[i].location);
    doc.result_double(tag + "_mass", dist.atoms[i].mass);
  }
  doc.result_int("components", static_cast<long long>(dist.components.size()));
  for (std::size_t i = 0; i < dist.components.size(); ++i) {
    const auto tag = "component_" + std::to_string(i);
    doc.result_double(tag + "_weight", dist.components[i].weight);
    doc.result_double(tag + "_lo", dist.components[i].lo);
    doc.result_double(tag + "_hi", dist.components[i].hi);
  }
  for (const char* level : {"0.25", "0.5", "0.75"}) {
    NumArg p{level};
    doc.result_double("quantile_" + std::string(level), dist.quantile(p.num("quantile")));
  }
}

const char* decision_label(int code) {
  switch (code) {
    case 0: return "theta0";
    case 1: return "theta1";
    case 2: return "abstain";
    default: return "conflict";
  }
}

template <class R>
void run_vote_simple(const ev::simple::TwoDensityModel<R>& m, const Opts& o,
                     ResultDoc& doc) {
  const int theta = parse_hypothesis_index(o.theta);
  doc.input("outcome", o.outcome);
  doc.input("theta", o.theta.text);
  const auto v = ev::simple::vote_simple(m, o.outcome, theta);
  doc.result_scalar("p_decide_1", v.p_decide_1);
  doc.result_scalar("p_decide_0", v.p_decide_0());
}

template <class R>
void run_vote_weighted(const ev::simple::TwoDensityModel<R>& m, const Opts& o,
                       ResultDoc& doc) {
  if (!o.lambda.present()) throw std::invalid_argument("vote-weighted needs --lambda");
  R lambda;
  if constexpr (ev::is_exact_scalar_v<R>)
    lambda = o.lambda.rat("--lambda");
  else
    lambda = o.lambda.num("--lambda");
  doc.input("outcome", o.outcome);
  doc.input("lambda", o.lambda.text);
  const auto v = ev::simple::vote_weighted(m, o.outcome, lambda);
  doc.result_scalar("p_decide_1", v.p_decide_1);
  doc.result_scalar("p_decide_0", v.p_decide_0());
}

template <class R>
void run_posterior(const ev::simple::TwoDensityModel<R>& m, const Opts& o,
                   ResultDoc& doc) {
  if (!o.lambda.present()) throw std::invalid_argument("posterior needs --lambda");
  R lambda;
  if constexpr (ev::is_exact_scalar_v<R>)
    lambda = o.lambda.rat("--lambda");
  else
    lambda = o.lambda.num("--lambda");
  doc.input("outcome", o.outcome);
  doc.input("lambda", o.lambda.text);
  const R post = ev::simple::posterior_prob_1(m, o.outcome, lambda);
  doc.result_scalar("posterior_1", post);
  doc.result_scalar("posterior_0", R(1) - post);
}

template <class R>
void add_test(ResultDoc& doc, const std::string& prefix,
              const ev::simple::SimpleTest<R>& test) {
  if (test.k.inf)
    doc.result(prefix + "_k", "inf");
  else
    doc.result_scalar(prefix + "_k", test.k.v);
  doc.result_scalar(prefix + "_beta", test.beta);
}

template <class R>
void run_bolshev(const ev::simple::TwoDensityModel<R>& m, const Opts& o,
                 ResultDoc& doc) {
  if (!o.alpha0.present() || !o.alpha1.present())
    throw std::invalid_argument("bolshev needs --alpha0 and --alpha1");
  R a0, a1;
  if constexpr (ev::is_exact_scalar_v<R>) {
    a0 = o.alpha0.rat("--alpha0");
    a1 = o.alpha1.rat("--alpha1");
  } else {
    a0 = o.alpha0.num("--alpha0");
    a1 = o.alpha1.num("--alpha1");
  }
  doc.input("alpha0", o.alpha0.text);
  doc.input("alpha1", o.alpha1.text);
  const auto rule = ev::bolshev::bolshev_optimal(m, a0, a1);
  add_test(doc, "lower", rule.lower);
  add_test(doc, "upper", rule.upper);
  doc.result_bool("non_unique", rule.non_unique);
  doc.result_scalar("risk_under_0", ev::bolshev::risk_under_0(rule, m));
  doc.result_scalar("risk_under_1", ev::bolshev::risk_under_1(rule, m));
  if (!o.outcome.empty()) {
    doc.input("outcome", o.outcome);
    const auto d = ev::bolshev::bolshev_apply(rule, m, o.outcome);
    doc.result_scalar("p_decide_0", d.p0);
    doc.result_scalar("p_decide_1", d.p1);
    doc.result_scalar("p_abstain", d.p2);
  }
}

template <class R>
void run_plebiscite(const ev::simple::TwoDensityModel<R>& m, const Opts& o,
                    ResultDoc& doc) {
  if (!o.alpha0.present() || !o.alpha1.present())
    throw std::invalid_argument("plebiscite needs --alpha0 and --alpha1");
  R a0, a1;
  if constexpr (ev::is_exact_scalar_v<R>) {
    a0 = o.alpha0.rat("--alpha0");
    a1 = o.alpha1.rat("--alpha1");
  } else {
    a0 = o.alpha0.num("--alpha0");
    a1 = o.alpha1.num("--alpha1");
  }
  doc.input("outcome", o.outcome);
  doc.input("alpha0", o.alpha0.text);
  doc.input("alpha1", o.alpha1.text);
  const int code = static_cast<int>(ev::bolshev::plebiscite(m, o.outcome, a0, a1));
  doc.result_int("decision", code);
  doc.result("decision_label", decision_label(code));
}

template <class R>
void run_divergence(const ev::simple::TwoDensityModel<R>& m, const Opts& o,
                    ResultDoc& doc) {
  doc.input("outcome", o.outcome);
  doc.result_scalar("divergence", ev::bolshev::vote_divergence(m, o.outcome));
}

template <class R>
void run_vote_stable(const ev::stable::DiscreteFamilyModel<R>& m, const Opts& o,
                     ResultDoc& doc) {
  if (!o.theta.present()) throw std::invalid_argument("vote-stable needs --theta");
  R theta;
  if constexpr (ev::is_exact_scalar_v<R>)
    theta = o.theta.rat("--theta");
  else
    theta = o.theta.num("--theta");
  doc.input("outcome", o.outcome);
  doc.input("theta", o.theta.text);
  const auto v = ev::stable::vote_stable(m, o.outcome, m.theta_index(theta));
  doc.result_scalar("p_decide_1", v.p_decide_1);
  doc.result_scalar("p_decide_0", v.p_decide_0());
}

template <class R>
void run_pvalue_model(const ev::stable::DiscreteFamilyModel<R>& m, const Opts& o,
                      ResultDoc& doc) {
  if (!o.theta.present()) throw std::invalid_argument("pvalue needs --theta");
  R theta;
  if constexpr (ev::is_exact_scalar_v<R>)
    theta = o.theta.rat("--theta");
  else
    theta = o.theta.num("--theta");
  doc.input("outcome", o.outcome);
  doc.input("theta", o.theta.text);
  const auto [q0, q1] =
      ev::stable::unilateral_pvalue(m, m.theta_index(theta), o.outcome);
  doc.result_scalar("p_reject_0", q1);
  doc.result_scalar("p_reject_1", q0);
}

int run(const std::string& cmd, const Opts& o, std::string& out) {
  ResultDoc doc(cmd);

  const auto finish = [&](bool rational) {
    doc.mode(rational);
    out = o.json ? doc.render_json() : doc.render_text();
    return 0;
  };

  const auto two_density = [&](auto&& fn) {
    const auto lm = load(o, ev::model_io::ModelKind::two_density, cmd.c_str());
    doc.input("model", o.model);
    if (lm.rational())
      fn(*lm.two_density_rational);
    else
      fn(*lm.two_density_float);
    return finish(lm.rational());
  };

  if (cmd == "vote-simple")
    return two_density([&](const auto& m) { run_vote_simple(m, o, doc); });
  if (cmd == "vote-weighted")
    return two_density([&](const auto& m) { run_vote_weighted(m, o, doc); });
  if (cmd == "posterior")
    return two_density([&](const auto& m) { run_posterior(m, o, doc); });
  if (cmd == "bolshev")
    return two_density([&](const auto& m) { run_bolshev(m, o, doc); });
  if (cmd == "plebiscite")
    return two_density([&](const auto& m) { run_plebiscite(m, o, doc); });
  if (cmd == "divergence")
    return two_density([&](const auto& m) { run_divergence(m, o, doc); });

  if (cmd == "vote-stable" || (cmd == "pvalue" && !o.model.empty())) {
    const auto lm = load(o, ev::model_io::ModelKind::discrete_family, cmd.c_str());
    doc.input("model", o.model);
    if (lm.rational()) {
      if (cmd == "vote-stable")
        run_vote_stable(*lm.family_rational, o, doc);
      else
        run_pvalue_model(*lm.family_rational, o, doc);
    } else {
      if (cmd == "vote-stable")
        run_vote_stable(*lm.family_float, o, doc);
      else
        run_pvalue_model(*lm.family_float, o, doc);
    }
    return finish(lm.rational());
  }

  if (cmd == "pvalue") {
    const auto fam = make_family(o);
    echo_family(o, doc);
    if (!o.theta.present() || !o.t.present())
      throw std::invalid_argument("pvalue needs --theta and --t");
    doc.input("theta", o.theta.text);
    doc.input("t", o.t.text);
    const auto [q0, q1] = ev::stable::unilateral_pvalue(
        fam.to_mid_cdf(), o.theta.num("--theta"), o.t.num("--t"));
    doc.result_double("p_reject_0", q1);
    doc.result_double("p_reject_1", q0);
    return finish(false);
  }

  if (cmd == "dist" || cmd == "dist-weighted") {
    const auto fam = make_family(o);
    echo_family(o, doc);
    if (!o.t.present()) throw std::invalid_argument(cmd + " needs --t");
    doc.input("t", o.t.text);
    ev::compat::ParamDistribution dist;
    if (cmd == "dist") {
      dist = ev::compat::param_distribution(fam, o.t.num("--t"));
    } else {
      if (!o.median.present() || !o.pull.present())
        throw std::invalid_argument("dist-weighted needs --median and --pull");
      doc.input("median", o.median.text);
      doc.input("pull", o.pull.text);
      if (o.spread.present()) doc.input("spread", o.spread.text);
      dist = ev::compat::param_distribution_weighted(
          fam, o.t.num("--t"),
          {o.median.num("--median"), o.pull.num("--pull"),
           o.spread.present() ? o.spread.num("--spread") : 0.0});
    }
    if (o.theta_f.present()) {
      // Vote for the parameter set below theta-f, with either boundary.
      const double tf = o.theta_f.num("--theta-f");
      fam.check_theta(tf);
      doc.input("theta_f", o.theta_f.text);
      doc.result_double("vote_closed", dist.cdf(tf));
      doc.result_double("vote_open", dist.cdf_left(tf));
    }
    if (o.query.empty() && !o.theta_f.present())
      summarize(dist, doc);
    else if (!o.query.empty())
      run_query(dist, o.query, doc);
    return finish(false);
  }

  if (cmd == "bilateral") {
    const auto fam = make_family(o);
    echo_family(o, doc);
    if (!o.t.present() || !o.theta1.present() || !o.theta2.present())
      throw std::invalid_argument("bilateral needs --t, --theta1 and --theta2");
    doc.input("t", o.t.text);
    doc.input("theta1", o.theta1.text);
    doc.input("theta2", o.theta2.text);
    const auto v = ev::compat::bilateral_vote(fam, o.t.num("--t"),
                                              o.theta1.num("--theta1"),
                                              o.theta2.num("--theta2"));
    doc.result_double("p_decide_1", v.p_decide_1);
    doc.result_double("p_decide_0", v.p_decide_0());
    return finish(false);
  }

  if (cmd == "check") {
    const auto reports = ev::check::run_suites(o.suite, o.seed);
    if (o.json) {
      ordered_json doc_json;
      doc_json["command"] = "check";
      doc_json["suite"] = o.suite;
      doc_json["seed"] = o.seed;
      ordered_json suites = ordered_json::array();
      bool pass = true;
      for (const auto& rep : reports) {
        ordered_json js;
        js["suite"] = rep.suite;
        ordered_json props = ordered_json::array();
        for (const auto& p : rep.properties) {
          props.push_back({{"name", p.name},
                           {"cases", p.cases},
                           {"worst", p.worst},
                           {"tolerance", p.tolerance},
                           {"pass", p.pass}});
          pass = pass && p.pass;
        }
        js["properties"] = props;
        suites.push_back(js);
      }
      doc_json["suites"] = suites;
      doc_json["pass"] = pass;
      out = doc_json.dump(2) + "\n";
      return pass ? 0 : 1;
    }
    out = ev::check::render_text(reports);
    bool pass = true;
    for (const auto& rep : reports) pass = pass && rep.pass();
    return pass ? 0 : 1;
  }

  throw std::invalid_argument("unknown subcommand '" + cmd + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mid-p expert votes, ternary decision rules, and parameter distributions"};
  app.require_subcommand(1);

  Opts o;
  std::string cmd;

  const auto add_common = [&](CLI::App* sc) {
    sc->add_flag("--json", o.json, "structured JSON output");
  };

  const auto opt = [&](CLI::App* sc, const char* flag, NumArg& dst, const char* help) {
    sc->add_option(flag, dst.text, help);
  };

  const auto add_model = [&](CLI::App* sc) {
    sc->add_option("--model", o.model, "model file path")->required();
  };
  const auto add_outcome = [&](CLI::App* sc) {
    sc->add_option("--outcome", o.outcome, "outcome label")->required();
  };
  const auto add_family = [&](CLI::App* sc) {
    sc->add_option("--family", o.family,
                   "normal_location | uniform_location | uniform_scale | "
                   "normal_scale | gamma_scale | poisson | binomial | "
                   "noncentral_beta")
        ->required();
    opt(sc, "--a", o.a, "normal_location spread");
    opt(sc, "--m", o.m, "normal_scale observation count");
    opt(sc, "--p", o.p, "gamma / noncentral_beta first shape");
    opt(sc, "--q", o.q, "noncentral_beta second shape");
    sc->add_option("--n", o.n, "poisson / binomial count constant");
  };

  {
    auto* sc = app.add_subcommand("vote-simple", "mid-p vote of one outcome under one law");
    add_model(sc);
    add_outcome(sc);
    opt(sc, "--theta", o.theta, "hypothesis index, 0 or 1");
    sc->get_option("--theta")->required();
    add_common(sc);
  }
  {
    auto* sc = app.add_subcommand("vote-weighted", "lambda-weighted vote");
    add_model(sc);
    add_outcome(sc);
    opt(sc, "--lambda", o.lambda, "weight on the second law, in [0, 1]");
    add_common(sc);
  }
  {
    auto* sc = app.add_subcommand("posterior", "posterior chance of hypothesis 1");
    add_model(sc);
    add_outcome(sc);
    opt(sc, "--lambda", o.lambda, "prior weight on hypothesis 1");
    add_common(sc);
  }
  {
    auto* sc = app.add_subcommand("bolshev", "optimal ternary decision rule");
    add_model(sc);
    sc->add_option("--outcome", o.outcome, "also apply the rule to this outcome");
    opt(sc, "--alpha0", o.alpha0, "risk cap under law 0");
    opt(sc, "--alpha1", o.alpha1, "risk cap under law 1");
    add_common(sc);
  }
  {
    auto* sc = app.add_subcommand("plebiscite", "threshold decision from the two votes");
    add_model(sc);
    add_outcome(sc);
    opt(sc, "--alpha0", o.alpha0, "rejection threshold against law 0");
    opt(sc, "--alpha1", o.alpha1, "rejection threshold against law 1");
    add_common(sc);
  }
  {
    auto* sc = app.add_subcommand("divergence", "difference of the votes against each side");
    add_model(sc);
    add_outcome(sc);
    add_common(sc);
  }
  {
    auto* sc = app.add_subcommand("vote-stable", "family vote at one theta");
    add_model(sc);
    add_outcome(sc);
    opt(sc, "--theta", o.theta, "theta value from the model");
    add_common(sc);
  }
  {
    auto* sc = app.add_subcommand("pvalue", "minimal rejection levels of the one-sided tests");
    sc->add_option("--model", o.model, "discrete family model file");
    sc->add_option("--outcome", o.outcome, "outcome label (model form)");
    sc->add_option("--family", o.family, "continuous family tag (family form)");
    opt(sc, "--a", o.a, "normal_location spread");
    opt(sc, "--m", o.m, "normal_scale observation count");
    opt(sc, "--p", o.p, "gamma / noncentral_beta first shape");
    opt(sc, "--q", o.q, "noncentral_beta second shape");
    sc->add_option("--n", o.n, "poisson / binomial count constant");
    opt(sc, "--theta", o.theta, "theta under test");
    opt(sc, "--t", o.t, "observed statistic (family form)");
    add_common(sc);
  }
  {
    auto* sc = app.add_subcommand("dist", "distribution of the parameter given the outcome");
    add_family(sc);
    opt(sc, "--t", o.t, "observed statistic");
    opt(sc, "--theta-f", o.theta_f, "also vote for the parameter set below this bound");
    sc->add_option("--query", o.query, "cdf:<x> | quantile:<p> | interval:<lo>,<hi>");
    add_common(sc);
  }
  {
    auto* sc = app.add_subcommand("dist-weighted", "parameter distribution pulled toward a prior guess");
    add_family(sc);
    opt(sc, "--t", o.t, "observed statistic");
    opt(sc, "--median", o.median, "prior guess the law is pulled toward");
    opt(sc, "--pull", o.pull, "pull strength lambda >= 0");
    opt(sc, "--spread", o.spread, "prior spread (normal_location only)");
    opt(sc, "--theta-f", o.theta_f, "also vote for the parameter set below this bound");
    sc->add_option("--query", o.query, "cdf:<x> | quantile:<p> | interval:<lo>,<hi>");
    add_common(sc);
  }
  {
    auto* sc = app.add_subcommand("bilateral", "vote against an interval hypothesis");
    add_family(sc);
    opt(sc, "--t", o.t, "observed statistic");
    opt(sc, "--theta1", o.theta1, "interval lower end");
    opt(sc, "--theta2", o.theta2, "interval upper end");
    add_common(sc);
  }
  {
    auto* sc = app.add_subcommand("student", "normal-mean vote with unknown variance");
    sc->add_option("--n", o.n, "sample size (>= 2)")->required();
    opt(sc, "--mean", o.t, "sample mean");
    opt(sc, "--variance", o.u, "sample variance");
    opt(sc, "--mu0", o.theta, "tested mean");
    sc->add_option("--query", o.query, "query the location law: cdf:<x> | quantile:<p> | interval:<lo>,<hi>");
    add_common(sc);
  }
  {
    auto* sc = app.add_subcommand("anova", "variance-ratio vote via the weighted series");
    opt(sc, "--p", o.p, "numerator shape");
    opt(sc, "--q", o.q, "denominator shape");
    opt(sc, "--t", o.t, "observed variance-component statistic");
    opt(sc, "--u", o.u, "residual statistic");
    opt(sc, "--theta1", o.theta1, "voted bound on the variance ratio");
    add_common(sc);
  }
  {
    auto* sc = app.add_subcommand("two-binomial", "chance that the first success rate is below the second");
    sc->add_option("--n1", o.n1, "first trial count")->required();
    sc->add_option("--n2", o.n2, "second trial count")->required();
    sc->add_option("--x1", o.x1, "first success count")->required();
    sc->add_option("--x2", o.x2, "second success count")->required();
    add_common(sc);
  }
  {
    auto* sc = app.add_subcommand("check", "run the property suites");
    sc->add_option("--suite", o.suite, "neutrality | monotonicity | additivity | oracles | all");
    sc->add_option("--seed", o.seed, "generator seed");
    add_common(sc);
  }

  try {
    app.parse(argc, argv);
    cmd = app.get_subcommands().front()->get_name();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    std::string out;

    // student and anova assemble their summaries here so `run` stays
    // dispatch-only for the model-file commands.
    if (cmd == "student") {
      if (!o.t.present() || !o.u.present() || !o.theta.present())
        throw std::invalid_argument("student needs --mean, --variance and --mu0");
      ResultDoc doc("student");
      doc.input_int("n", o.n);
      doc.input("mean", o.t.text);
      doc.input("variance", o.u.text);
      doc.input("mu0", o.theta.text);
      const ev::ghost::StudentSummary s{o.n, o.t.num("--mean"),
                                        o.u.num("--variance"), o.theta.num("--mu0")};
      const auto v = ev::ghost::student_vote(s);
      doc.result_double("p_decide_0", v.p_decide_0());
      doc.result_double("p_decide_1", v.p_decide_1);
      if (!o.query.empty()) run_query(ev::ghost::student_distribution(s), o.query, doc);
      doc.mode(false);
      out = o.json ? doc.render_json() : doc.render_text();
      std::fputs(out.c_str(), stdout);
      return 0;
    }
    if (cmd == "anova") {
      if (!o.t.present() || !o.u.present())
        throw std::invalid_argument("anova needs --t and --u");
      ResultDoc doc("anova");
      const ev::ghost::AnovaSummary s{
          o.p.present() ? o.p.num("--p") : 1.0, o.q.present() ? o.q.num("--q") : 1.0,
          o.t.num("--t"), o.u.num("--u"),
          o.theta1.present() ? o.theta1.num("--theta1") : 0.0};
      doc.input("p", ev::decimal_string(s.p));
      doc.input("q", ev::decimal_string(s.q));
      doc.input("t", o.t.text);
      doc.input("u", o.u.text);
      doc.input("theta1", ev::decimal_string(s.theta1));
      const auto r = ev::ghost::anova_vote(s);
      doc.result_double("p_decide_1", r.value);
      doc.result_double("truncation_bound", r.tail_bound);
      doc.result_int("terms", static_cast<long long>(r.terms));
      doc.mode(false);
      out = o.json ? doc.render_json() : doc.render_text();
      std::fputs(out.c_str(), stdout);
      return 0;
    }
    if (cmd == "two-binomial") {
      ResultDoc doc("two-binomial");
      doc.input_int("n1", o.n1);
      doc.input_int("n2", o.n2);
      doc.input_int("x1", o.x1);
      doc.input_int("x2", o.x2);
      const ev::ghost::TwoBinomialSummary s{o.n1, o.n2, o.x1, o.x2};
      doc.result_rational("p_decide_1", ev::ghost::two_binomial_vote(s));
      doc.result_rational("tie_mass", ev::ghost::two_binomial_tie_mass(s));
      doc.mode(true);
      out = o.json ? doc.render_json() : doc.render_text();
      std::fputs(out.c_str(), stdout);
      return 0;
    }

    const int status = run(cmd, o, out);
    std::fputs(out.c_str(), stdout);
    return status;
  } catch (const ev::numeric_domain_error& e) {
    std::cerr << "numeric domain error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
