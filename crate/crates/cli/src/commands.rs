//! One function per subcommand, each turning resolved settings into a table.

use rabi_aa::dynamics::{b_of_n, block_frequencies, uniform_grid, BellTransition, BlockDynamics, CoherentTransition};
use rabi_aa::model::poisson_weight;
use rabi_aa::oracle::{recommended_ncut, ExactSystem, TruncatedSpace};
use rabi_aa::revival::{
    direct_revival_peak, envelope_with, forward_index, quadratic_fit, reconstruct, revival_time, revival_width,
    t1_const, EnvelopeForm, DEFAULT_KMAX,
};
use rabi_aa::search::{exact_rescore, search, Alpha2Candidates, Objective, SearchSpec};
use rabi_aa::{block_spectrum, BellState, ModelParams};

use crate::config::Settings;
use crate::error::{CliError, Result};
use crate::table::{Cell, Table};

fn params(s: &Settings) -> Result<ModelParams> {
    Ok(ModelParams::new(s.f64("beta")?, s.f64("a")?, s.f64("ratio")?)?)
}

fn single(s: &Settings, key: &str) -> Result<f64> {
    match s.list(key)?.as_slice() {
        [x] => Ok(*x),
        v => Err(CliError::config(key, format!("expected a single value, got {}", v.len()))),
    }
}

fn alpha2(s: &Settings) -> Result<f64> {
    let a2 = single(s, "alpha2")?;
    if a2 <= 0.0 {
        return Err(CliError::config("alpha2", "must be > 0"));
    }
    Ok(a2)
}

fn header(t: &mut Table, command: &str, p: Option<&ModelParams>) {
    t.meta("command", command);
    t.meta("version", rabi_aa::VERSION);
    if let Some(p) = p {
        t.meta("beta", p.beta);
        t.meta("a", p.a);
        t.meta("ratio", p.ratio);
        t.warnings.extend(p.advisories().iter().map(|a| a.to_string()));
    }
}

fn grid(s: &Settings, t: &mut Table, tau_max: f64, samples: usize) -> Result<Vec<f64>> {
    let tau_max = s.f64_or("tau_max", tau_max)?;
    let samples = s.usize_or("tau_samples", samples)?;
    t.meta("tau_max", tau_max);
    t.meta("tau_samples", samples);
    Ok(uniform_grid(tau_max, samples)?)
}

fn label(x: f64) -> String {
    format!("{x}")
}

/// Per-block couplings, energies, eigenvector components, `w0` and `B`, plus
/// Poisson weights for each listed mean photon number.
pub fn spectrum(s: &Settings) -> Result<Table> {
    let p = params(s)?;
    let n_min = s.usize_or("n_min", 0)?;
    let n_max = s.usize_or("n_max", 10)?;
    let means = s.list_opt("alpha2")?.unwrap_or_default();
    let mut cols = vec![
        "N", "omega1", "omega2", "t0_tilde", "e0", "e_plus", "e_minus", "y_plus", "y_minus", "l2_plus", "l2_minus",
        "w0", "B",
    ]
    .into_iter()
    .map(String::from)
    .collect::<Vec<_>>();
    cols.extend(means.iter().map(|m| format!("p_{}", label(*m))));
    let mut t = Table { columns: cols, ..Table::default() };
    header(&mut t, "spectrum", Some(&p));
    t.meta("n_min", n_min);
    t.meta("n_max", n_max);
    if !means.is_empty() {
        t.meta("alpha2", means.iter().map(|m| label(*m)).collect::<Vec<_>>().join(","));
    }
    for n in n_min as u64..=n_max as u64 {
        if n_max < n_min {
            break;
        }
        let b = block_spectrum(&p, n);
        let mut row: Vec<Cell> = vec![
            n.into(),
            b.omega1.into(),
            b.omega2.into(),
            b.t0_tilde.into(),
            b.e0.into(),
            b.e_plus.into(),
            b.e_minus.into(),
            b.y_plus.into(),
            b.y_minus.into(),
            b.l2_plus.into(),
            b.l2_minus.into(),
            b.splitting().into(),
            b_of_n(&p, n).into(),
        ];
        row.extend(means.iter().map(|&m| Cell::Float(poisson_weight(n, m))));
        t.push(row);
    }
    Ok(t)
}

/// Block probabilities for one photon number over time.
pub fn dynamics(s: &Settings) -> Result<Table> {
    let p = params(s)?;
    let n = s.usize_or("n", 2)? as u64;
    let mut t = Table::new(&["tau", "P1", "T1_to_m1", "T1_to_0", "P0", "T_block"]);
    header(&mut t, "dynamics", Some(&p));
    t.meta("n", n);
    let grid = grid(s, &mut t, 100.0, 1001)?;
    let d = BlockDynamics::new(&p, n)?;
    let f = block_frequencies(&p, n);
    let b = b_of_n(&p, n);
    t.meta_f64("w0", f.w0);
    t.meta_f64("w1", f.w1);
    t.meta_f64("w2", f.w2);
    t.meta_f64("B", b);
    for &tau in &grid {
        t.push(vec![
            tau.into(),
            d.p1(tau).into(),
            d.t1_to_m1(tau).into(),
            d.t1_to_0(tau).into(),
            d.p0(tau).into(),
            (b * (1.0 - (f.w0 * tau).cos())).into(),
        ]);
    }
    Ok(t)
}

/// Coherent-field transition out of `|I_0>` and the four Bell-to-Bell
/// probabilities between `|I_+1>` and `|I_-1>`.
pub fn coherent(s: &Settings) -> Result<Table> {
    let p = params(s)?;
    let a2 = alpha2(s)?;
    let mut t = Table::new(&["tau", "T", "survival", "P_pp", "P_pm", "P_mm", "P_mp"]);
    header(&mut t, "coherent", Some(&p));
    t.meta("alpha2", a2);
    let grid = grid(s, &mut t, 500.0, 2000)?;
    let alpha = a2.sqrt();
    let tr = CoherentTransition::new(&p, alpha)?;
    t.meta("poisson_cutoff", tr.cutoff());
    t.meta_f64("poisson_tail", tr.truncation_tail());
    t.meta_f64("plateau", tr.plateau());
    let bell: Vec<BellTransition> = [(1, 1), (1, -1), (-1, -1), (-1, 1)]
        .iter()
        .map(|&(d, db)| BellTransition::new(&p, d, db, alpha))
        .collect::<rabi_aa::Result<_>>()?;
    let series = tr.series(&grid)?;
    let mut max_t: f64 = 0.0;
    for (i, &tau) in grid.iter().enumerate() {
        let v = series.values[i];
        max_t = max_t.max(v);
        let mut row: Vec<Cell> = vec![tau.into(), v.into(), (1.0 - v).into()];
        row.extend(bell.iter().map(|b| Cell::Float(b.at(tau))));
        t.push(row);
    }
    t.meta_f64("max_T", max_t);
    Ok(t)
}

/// Quadratic fit, direct sum and Poisson-summation reconstruction of
/// `T(alpha, tau)`.
pub fn revival(s: &Settings) -> Result<Table> {
    let p = params(s)?;
    let a2 = alpha2(s)?;
    let fit = quadratic_fit(&p, a2.sqrt())?;
    let t_rev = revival_time(&fit, 1)?;
    let mut t = Table::new(&["tau", "T_direct", "T_reconstructed", "T_reconstructed_unhalved", "envelope_k1"]);
    header(&mut t, "revival", Some(&p));
    t.meta("alpha2", a2);
    t.warnings.extend(fit.advisories());
    let grid = grid(s, &mut t, (1.5 * t_rev).ceil(), 3001)?;
    let kmax = s.usize_or("kmax", DEFAULT_KMAX as usize)? as u32;
    t.meta("kmax", kmax);
    let direct = CoherentTransition::new(&p, a2.sqrt())?;
    t.meta("poisson_cutoff", direct.cutoff());
    t.meta("nbar", fit.nbar);
    for (k, v) in [("b0", fit.b0), ("b1", fit.b1), ("b2", fit.b2), ("c1", fit.c1), ("c2", fit.c2), ("w0", fit.w0_nbar)] {
        t.meta_f64(k, v);
    }
    t.meta_f64("plateau", t1_const(&fit).value);
    t.meta_f64("t_rev_1", t_rev);
    t.meta_f64("width_1", revival_width(&fit, 1, EnvelopeForm::Derived)?);
    t.meta_f64("direct_peak_1", direct_revival_peak(&p, &fit, 1, 4001)?);
    let derived = reconstruct(&fit, &grid, kmax, EnvelopeForm::Derived)?;
    let unhalved = reconstruct(&fit, &grid, kmax, EnvelopeForm::Unhalved)?;
    let k1 = forward_index(&fit, 1);
    for (i, &tau) in grid.iter().enumerate() {
        t.push(vec![
            tau.into(),
            direct.at(tau).into(),
            derived[i].into(),
            unhalved[i].into(),
            envelope_with(&fit, k1, tau, EnvelopeForm::Derived).amplitude.into(),
        ]);
    }
    Ok(t)
}

/// Ranked grid search, optionally re-scored with the exact engine.
pub fn search_cmd(s: &Settings) -> Result<Table> {
    let defaults = SearchSpec::default();
    let objective = match s.get("objective").unwrap_or("worst_case") {
        "worst_case" => Objective::WorstCaseT,
        "plateau" => Objective::PlateauT1,
        other => return Err(CliError::config("objective", format!("expected worst_case or plateau, got {other:?}"))),
    };
    let alpha2 = match s.get("alpha2") {
        Some("zeros") => Alpha2Candidates::FromZeros {
            n_range: (s.usize_or("n_min", 1)? as u64, s.usize_or("n_max", 200)? as u64),
        },
        Some(_) => Alpha2Candidates::List(s.list("alpha2")?),
        None => defaults.alpha2.clone(),
    };
    let spec = SearchSpec {
        beta_grid: s.list_opt("beta")?.unwrap_or(defaults.beta_grid),
        a_grid: s.list_opt("a")?.unwrap_or(defaults.a_grid),
        r_grid: s.list_opt("ratio")?.unwrap_or(defaults.r_grid),
        alpha2,
        tau_horizon: s.f64_or("tau_max", defaults.tau_horizon)?,
        tau_samples: s.usize_or("tau_samples", defaults.tau_samples)?,
        objective,
    };
    let top = s.usize_opt("top")?;
    let rescore_top = s.usize_or("rescore_top", 0)?;

    let mut cols = vec!["rank", "beta", "a", "ratio", "alpha2", "score", "t0_sq_at_nbar", "zeros_nearby"];
    if rescore_top > 0 {
        cols.extend(["exact_alpha2", "ncut", "approx_score_reduced", "exact_score_reduced"]);
    }
    let mut t = Table::new(&cols);
    header(&mut t, "search", None);
    let join = |v: &[f64]| v.iter().map(|x| label(*x)).collect::<Vec<_>>().join(",");
    t.meta("beta", join(&spec.beta_grid));
    t.meta("a", join(&spec.a_grid));
    t.meta("ratio", join(&spec.r_grid));
    t.meta(
        "alpha2",
        match &spec.alpha2 {
            Alpha2Candidates::List(v) => join(v),
            Alpha2Candidates::FromZeros { n_range } => format!("zeros:{}:{}", n_range.0, n_range.1),
        },
    );
    t.meta("objective", s.get("objective").unwrap_or("worst_case"));
    t.meta("tau_max", spec.tau_horizon);
    t.meta("tau_samples", spec.tau_samples);

    let results = search(&spec)?;
    t.meta("evaluated", results.len());
    let shown = &results[..top.unwrap_or(results.len()).min(results.len())];
    let rescored = if rescore_top > 0 {
        let a2 = s.f64_or("rescore_alpha2", 9.0)?;
        t.meta("rescore_top", rescore_top);
        t.meta("rescore_alpha2", a2);
        exact_rescore(shown, rescore_top, a2, spec.tau_horizon.min(100.0), 401)?
    } else {
        Vec::new()
    };
    for (i, r) in shown.iter().enumerate() {
        let zeros = r.zeros_nearby.iter().map(|z| format!("{}-{}", z.lower, z.upper)).collect::<Vec<_>>().join(";");
        let mut row: Vec<Cell> = vec![
            (i + 1).into(),
            r.params.beta.into(),
            r.params.a.into(),
            r.params.ratio.into(),
            r.alpha2.into(),
            r.score.into(),
            r.t0_sq_at_nbar.into(),
            zeros.into(),
        ];
        if rescore_top > 0 {
            match rescored.get(i) {
                Some(x) => row.extend([x.alpha2.into(), x.ncut.into(), x.approx_score.into(), x.exact_score.into()]),
                None => row.extend((0..4).map(|_| Cell::Text(String::new()))),
            }
        }
        t.push(row);
    }
    Ok(t)
}

/// Exact-engine survival of `|I_0>|alpha>` against the approximate
/// `1 - T`, one row per ratio.
pub fn oracle(s: &Settings) -> Result<Table> {
    let beta = s.f64("beta")?;
    let a = s.f64("a")?;
    let ratios = s.list("ratio")?;
    let a2 = alpha2(s)?;
    let mut t = Table::new(&[
        "ratio",
        "ncut",
        "max_deviation",
        "truncation_delta",
        "spectrum_max_error",
        "exact_min_survival",
        "approx_min_survival",
    ]);
    header(&mut t, "oracle", None);
    t.meta("beta", beta);
    t.meta("a", a);
    t.meta("ratio", ratios.iter().map(|r| label(*r)).collect::<Vec<_>>().join(","));
    t.meta("alpha2", a2);
    let grid = grid(s, &mut t, 50.0, 401)?;
    let ncut = s.usize_or("ncut", recommended_ncut(a2, beta))?;
    t.meta("ncut", ncut);
    let blocks = (a2.floor() as usize + 1).min(ncut / 2);
    t.meta("blocks", blocks);
    let alpha = a2.sqrt();
    for &r in &ratios {
        let p = ModelParams::new(beta, a, r)?;
        let space = TruncatedSpace::new(ncut)?;
        let sys = ExactSystem::new(&p, space);
        let exact = sys.bell_survival(BellState::PhiMinus, alpha, &grid)?.values;
        let doubled = ExactSystem::new(&p, space.doubled()).bell_survival(BellState::PhiMinus, alpha, &grid)?.values;
        let tr = CoherentTransition::new(&p, alpha)?;
        let approx: Vec<f64> = grid.iter().map(|&tau| 1.0 - tr.at(tau)).collect();
        let gap = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        let spec_err = sys.compare_spectrum(blocks)?.iter().map(|c| c.max_error()).fold(0.0, f64::max);
        let min = |x: &[f64]| x.iter().copied().fold(f64::INFINITY, f64::min);
        t.push(vec![
            r.into(),
            ncut.into(),
            gap(&exact, &approx).into(),
            gap(&exact, &doubled).into(),
            spec_err.into(),
            min(&exact).into(),
            min(&approx).into(),
        ]);
    }
    Ok(t)
}
