#include "gtm/commands.hpp"

#include "gtm/io.hpp"
#include "gtm/lattice.hpp"
#include "gtm/pf.hpp"
#include "gtm/resonance.hpp"
#include "gtm/stats.hpp"

#include <cmath>
#include <numbers>

namespace gtm {

namespace {

using nlohmann::json;

int narrow(std::int64_t v, const char* key) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError(std::string("key '") + key + "': out of range");
  return static_cast<int>(v);
}

std::int64_t positive(const RunConfig& cfg, const char* key) {
  const std::int64_t v = cfg.integer(key);
  if (v < 1) throw ConfigError(std::string("key '") + key + "': must be at least 1");
  return v;
}

ChannelPotential potential_from(const RunConfig& cfg) {
  const double mu = cfg.real("mu");
  const double eta = cfg.real("eta");
  if (mu < 0.0) throw ConfigError("key 'mu': must be non-negative");
  if (!(eta > 0.0)) throw ConfigError("key 'eta': must be positive");
  return build_potential(mu, eta);
}

void emit_potential(const RunConfig& cfg, std::ostream& out) {
  const ChannelPotential pot = potential_from(cfg);
  const std::int64_t points = positive(cfg, "points");
  if (cfg.format == EmitFormat::json) {
    json j;
    j["mu"] = pot.mu();
    j["eta"] = pot.eta();
    j["max_channel"] = pot.max_channel();
    j["breakpoints"] = pot.breakpoints();
    write_json(out, j);
    return;
  }
  CsvWriter csv(out, {"theta", "V", "dV"}, describe(cfg));
  for (std::int64_t i = 0; i < points; ++i) {
    const double theta = two_pi * static_cast<double>(i) / static_cast<double>(points);
    csv.row({theta, potential_value(pot, theta), kick_impulse(pot, theta)});
  }
}

void emit_series(const RunConfig& cfg, const EnergySeries& s, std::ostream& out) {
  if (cfg.format == EmitFormat::json) {
    json j;
    j["t"] = s.times;
    j["mean_p2"] = std::vector<double>(s.mean_p2.begin(), s.mean_p2.end());
    j["windowed_mean_p2"] = std::vector<double>(s.windowed_mean_p2.begin(), s.windowed_mean_p2.end());
    j["window"] = s.window;
    write_json(out, j);
    return;
  }
  CsvWriter csv(out, {"t", "mean_p2", "windowed_mean_p2"}, describe(cfg));
  for (std::size_t i = 0; i < s.times.size(); ++i)
    csv.row({static_cast<double>(s.times[i]), s.mean_p2(static_cast<Eigen::Index>(i)),
             s.windowed_mean_p2(static_cast<Eigen::Index>(i))});
}

void emit_simulate(const RunConfig& cfg, std::ostream& out) {
  const EnsembleSpec spec = ensemble_spec(cfg);
  const std::string& model = cfg.text("model");
  if (model == "gtm") {
    emit_series(cfg, simulate_ensemble(potential_from(cfg), spec), out);
  } else if (model == "standard") {
    emit_series(cfg, standard_map_baseline(cfg.real("mu"), spec, cfg.real("eta")), out);
  } else {
    throw ConfigError("key 'model': expected gtm or standard, got '" + model + "'");
  }
}

void emit_histogram(const RunConfig& cfg, std::ostream& out) {
  const MomentumHistogram h = momentum_distribution(potential_from(cfg), ensemble_spec(cfg));
  if (cfg.format == EmitFormat::json) {
    json j;
    j["bin_center"] = h.centers;
    j["probability"] = h.probabilities;
    j["bin_width"] = h.bin_width;
    j["window"] = h.window;
    write_json(out, j);
    return;
  }
  CsvWriter csv(out, {"bin_center", "probability"}, describe(cfg));
  for (std::size_t i = 0; i < h.centers.size(); ++i) csv.row({h.centers[i], h.probabilities[i]});
}

void emit_portrait(const RunConfig& cfg, std::ostream& out) {
  const ChannelPotential pot = potential_from(cfg);
  const std::int64_t orbits = positive(cfg, "orbits");
  const std::int64_t steps = positive(cfg, "steps");
  CsvWriter csv(out, {"orbit", "theta", "p_mod_2pi"}, describe(cfg));
  for (std::int64_t o = 0; o < orbits; ++o) {
    const double p0 = cfg.real("p0") + pot.eta() * static_cast<double>(o) / static_cast<double>(orbits);
    for (const auto& pt : orbit_trace(pot, {wrap_angle(cfg.real("theta0")), p0}, steps))
      csv.row({static_cast<double>(o), pt.theta, pt.p});
  }
}

void emit_resonance(const RunConfig& cfg, std::ostream& out) {
  const std::int64_t P = cfg.integer("P"), Q = cfg.integer("Q"), s = cfg.integer("s");
  if (P < 1 || Q < 1 || s < 1) throw ConfigError("keys 'P', 'Q', 's': must be at least 1");
  const double eta = static_cast<double>(s) * two_pi * static_cast<double>(P) / static_cast<double>(Q);
  if (cfg.real("mu") < 0.0) throw ConfigError("key 'mu': must be non-negative");
  const ChannelPotential pot = build_potential(cfg.real("mu"), eta);
  ResonanceParams params;
  try {
    params = make_resonance(pot, P, Q, cfg.integer("r"), s, cfg.real("theta0"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::string& mode = cfg.text("mode");
  if (mode == "cycle") {
    const TorusCycle c = find_cycle(params, cfg.integer("N0"), cfg.integer("M0"));
    json j;
    j["T"] = c.T;
    j["K"] = c.K;
    j["L"] = c.L;
    j["coefficient"] = ballistic_coefficient(c, params);
    j["N0"] = c.start.N;
    j["M0"] = c.start.M;
    j["lambda"] = params.lambda;
    j["eta"] = params.eta;
    j["beta"] = params.beta;
    write_json(out, j);
    return;
  }
  if (mode != "census") throw ConfigError("key 'mode': expected cycle or census, got '" + mode + "'");
  const std::int64_t samples = cfg.integer("samples");
  const CycleCensus census = samples > 0 ? cycle_census(params, samples, cfg.seed) : cycle_census(params);
  if (cfg.format == EmitFormat::json) {
    json j;
    j["states"] = census.states;
    j["ballistic_states"] = census.ballistic_states;
    j["cycles"] = census.cycles;
    j["ballistic_fraction"] = census.ballistic_fraction;
    j["mean_c2"] = census.mean_c2;
    j["max_abs_c"] = census.max_abs_c;
    j["max_period"] = census.max_period;
    j["max_abs_L"] = census.max_abs_L;
    write_json(out, j);
    return;
  }
  CsvWriter csv(out, {"T", "L", "states", "coefficient"}, describe(cfg));
  for (const auto& [key, count] : census.period_winding) {
    const auto [T, L] = key;
    csv.row({static_cast<double>(T), static_cast<double>(L), static_cast<double>(count),
             static_cast<double>(L * Q) * params.lambda / static_cast<double>(T)});
  }
}

PFField initial_field(const RunConfig& cfg, int G, int N) {
  const std::string& kind = cfg.text("initial");
  const int n0 = narrow(cfg.integer("n0"), "n0");
  if (std::abs(n0) > N) throw ConfigError("key 'n0': outside the band range");
  if (kind == "uniform") return uniform_band_field(G, N, n0);
  if (kind == "gaussian") {
    if (!(cfg.real("width") > 0.0)) throw ConfigError("key 'width': must be positive");
    return gaussian_bump_field(G, N, cfg.real("theta_c"), cfg.real("width"), n0);
  }
  if (kind == "cell") {
    const int g0 = static_cast<int>(std::llround(wrap_angle(cfg.real("theta_c")) / (two_pi / G))) % G;
    return cell_bump_field(G, N, g0, n0);
  }
  throw ConfigError("key 'initial': expected uniform, gaussian or cell, got '" + kind + "'");
}

void emit_pf(const RunConfig& cfg, std::ostream& out) {
  const ChannelPotential pot = potential_from(cfg);
  const int G = narrow(cfg.integer("G"), "G");
  const int N = narrow(cfg.integer("N_band"), "N_band");
  if (G < 2 || (G & (G - 1)) != 0) throw ConfigError("key 'G': must be a power of two");
  if (N < 2 * pot.max_channel()) throw ConfigError("key 'N_band': must be at least 2J");
  const std::int64_t steps = cfg.integer("steps");
  const std::int64_t every = positive(cfg, "every");
  if (steps < 0) throw ConfigError("key 'steps': must be non-negative");
  const std::string& ordering = cfg.text("ordering");
  if (ordering != "printed" && ordering != "factorized")
    throw ConfigError("key 'ordering': expected printed or factorized, got '" + ordering + "'");
  const std::string& emit = cfg.text("emit");
  if (emit != "summary" && emit != "harmonics" && emit != "bands")
    throw ConfigError("key 'emit': expected summary, harmonics or bands, got '" + emit + "'");

  PerronFrobenius u(pot, cfg.real("beta"), G, N,
                    ordering == "printed" ? KickOrdering::printed : KickOrdering::factorized);
  PFField field = initial_field(cfg, G, N);
  const double norm0 = field.norm_squared();

  std::vector<std::string> columns;
  if (emit == "summary")
    columns = {"t", "norm", "norm_drift", "harmonic_pn", "band_pn", "boundary_fraction"};
  else if (emit == "harmonics")
    columns = {"t", "k", "probability"};
  else
    columns = {"t", "n", "probability"};
  CsvWriter csv(out, columns, describe(cfg));

  for (std::int64_t t = 0; t <= steps; ++t) {
    if (t > 0) u.step(field);
    if (t % every != 0 && t != steps) continue;
    const double time = static_cast<double>(t);
    if (emit == "summary") {
      const double norm = field.norm_squared();
      const HarmonicDistribution h = harmonic_distribution(field, time);
      csv.row({time, norm, norm - norm0, participation_number(h.probability),
               participation_number(band_distribution(field)), u.boundary_fraction(field)});
    } else if (emit == "harmonics") {
      const HarmonicDistribution h = harmonic_distribution(field, time);
      for (std::size_t i = 0; i < h.k.size(); ++i)
        csv.row({time, static_cast<double>(h.k[i]), h.probability(static_cast<Eigen::Index>(i))});
    } else {
      const Eigen::VectorXd w = band_distribution(field);
      for (int n = -N; n <= N; ++n) csv.row({time, static_cast<double>(n), w(n + N)});
    }
  }
}

json slice_json(const SliceStatistics& s) {
  return {{"ks_distance", s.ks_distance},
          {"lag1_autocorrelation", s.lag1_autocorrelation},
          {"max_autocorrelation", s.max_autocorrelation},
          {"distinct_values", s.distinct_values}};
}

void emit_lattice(const RunConfig& cfg, std::ostream& out) {
  const std::string& model = cfg.text("model");
  const std::string& emit = cfg.text("emit");
  const double mu = cfg.real("mu");

  auto spacing = [&](const char* key) {
    if (cfg.has(key)) return cfg.real(key);
    if (cfg.has("eta")) return cfg.real("eta");
    throw ConfigError(std::string("missing required key '") + key + "'");
  };

  if (emit == "onsite" || emit == "diagnostic") {
    const OnSitePhaseGen gen{spacing("eta"), cfg.real("beta"), cfg.real("omega")};
    if (emit == "onsite") {
      const IndexRange n{cfg.integer("n_first"), cfg.integer("n_last")};
      const IndexRange k{cfg.integer("k_first"), cfg.integer("k_last")};
      if (n.size() < 1 || k.size() < 1) throw ConfigError("onsite: empty index range");
      const OnSiteTable t = onsite_sequence(gen, n, k);
      CsvWriter csv(out, {"n", "k", "chi", "z", "pole"}, describe(cfg));
      for (long a = 0; a < n.size(); ++a)
        for (long b = 0; b < k.size(); ++b)
          csv.row({static_cast<double>(n.first + a), static_cast<double>(k.first + b), t.chi(a, b), t.z(a, b),
                   t.pole(a, b) ? 1.0 : 0.0});
      return;
    }
    SliceSpec slices;
    slices.length = positive(cfg, "length");
    const PseudorandomnessReport r = pseudorandomness_diagnostic(gen, slices);
    json j;
    j["eta"] = gen.eta;
    j["beta"] = gen.beta;
    j["omega"] = gen.omega;
    j["length"] = slices.length;
    j["along_n"] = slice_json(r.along_n);
    j["along_k"] = slice_json(r.along_k);
    j["diagonal"] = slice_json(r.diagonal);
    write_json(out, j);
    return;
  }

  CouplingTable table;
  if (model == "gtm") {
    const int cutoff = cfg.has("cutoff") ? narrow(cfg.integer("cutoff"), "cutoff") : 4096;
    if (cutoff < 1) throw ConfigError("key 'cutoff': must be at least 1");
    const double eta = spacing("eta");
    if (mu < 0.0 || !(eta > 0.0)) throw ConfigError("keys 'mu', 'eta': need mu >= 0 and eta > 0");
    table = gtm_couplings(build_potential(mu, eta), cutoff);
  } else if (model == "qkr-tan" || model == "qkr-half") {
    const int cutoff = cfg.has("cutoff") ? narrow(cfg.integer("cutoff"), "cutoff") : 32;
    if (cutoff < 1) throw ConfigError("key 'cutoff': must be at least 1");
    const double hbar = spacing("hbar");
    table = model == "qkr-tan" ? qkr_tan_couplings(mu, hbar, cutoff) : qkr_halfkick_couplings(mu, hbar, cutoff);
  } else {
    throw ConfigError("key 'model': expected gtm, qkr-tan or qkr-half, got '" + model + "'");
  }

  if (emit == "table") {
    CsvWriter csv(out, {"dn", "dk", "re", "im", "abs", "phase"}, describe(cfg));
    for (int dn = -table.max_dn; dn <= table.max_dn; ++dn)
      for (int dk = -table.max_dk; dk <= table.max_dk; ++dk) {
        const auto w = table(dn, dk);
        csv.row({static_cast<double>(dn), static_cast<double>(dk), w.real(), w.imag(), std::abs(w), std::arg(w)});
      }
  } else if (emit == "decay-n" || emit == "decay-k") {
    CsvWriter csv(out, {"offset", "max_abs"}, describe(cfg));
    for (const auto& p : decay_profile(table, emit == "decay-n" ? Axis::n : Axis::k))
      csv.row({static_cast<double>(p.offset), p.max_abs});
  } else {
    throw ConfigError("key 'emit': expected table, decay-n, decay-k, onsite or diagnostic, got '" + emit + "'");
  }
}

}  // namespace

std::string describe(const RunConfig& cfg) {
  std::string s = "gtm " + cfg.subcommand;
  for (const auto& [key, expr] : cfg.expressions) s += " " + key + "=" + expr;
  return s;
}

EnsembleSpec ensemble_spec(const RunConfig& cfg) {
  EnsembleSpec spec;
  spec.size = static_cast<std::size_t>(positive(cfg, "size"));
  spec.kicks = positive(cfg, "kicks");
  spec.seed = cfg.seed;
  spec.window = positive(cfg, "window");
  if (spec.window > spec.kicks) throw ConfigError("key 'window': must not exceed kicks");
  if (cfg.has("ratio")) {
    spec.record_ratio = cfg.real("ratio");
    if (!(spec.record_ratio > 1.0)) throw ConfigError("key 'ratio': must exceed 1");
  }
  const std::string& sampling = cfg.text("sampling");
  if (sampling == "fixed") {
    spec.p0_mode = InitialMomentum::fixed;
    spec.p0 = cfg.real("beta");
  } else if (sampling == "uniform") {
    spec.p0_mode = InitialMomentum::uniform_cell;
  } else {
    throw ConfigError("key 'sampling': expected fixed or uniform, got '" + sampling + "'");
  }
  return spec;
}

void run_subcommand(const RunConfig& cfg, std::ostream& out) {
  const std::string& s = cfg.subcommand;
  if (s == "potential")
    emit_potential(cfg, out);
  else if (s == "simulate")
    emit_simulate(cfg, out);
  else if (s == "histogram")
    emit_histogram(cfg, out);
  else if (s == "portrait")
    emit_portrait(cfg, out);
  else if (s == "resonance")
    emit_resonance(cfg, out);
  else if (s == "pf")
    emit_pf(cfg, out);
  else if (s == "lattice")
    emit_lattice(cfg, out);
  else
    throw ConfigError("unknown subcommand '" + s + "'");
}

}  // namespace gtm
