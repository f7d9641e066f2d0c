//! Verification suites: each runs one family of identities end to end and
//! returns named, timed check outcomes. The command-line `verify` command
//! and the acceptance tests are thin wrappers around [`run_suite`].
//!
//! Checks of a suite run in a small worker pool; results are sorted by
//! check name so reports are reproducible for a fixed seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use crate::cluster::{apply_transformation, decompose_mutation, is_trivial_classical, map_diagonal, map_i, map_j, map_p_times_p, map_phi, map_pi, map_swap, mutation, ClusterTransformation, Space, Substitution};
use crate::error::{Error, Result};
use crate::feed::Feed;
use crate::intertwiner::{commutation_residual, default_tests, kernel_g_consistency, unitarity_defect, verify_relation_numeric, CommutationItem};
use crate::k2::{pullback_form_numeric, steinberg_delta, steinberg_delta_a};
use crate::qdilog::{check_property, default_grid, Property};
use crate::quantum::mutation::sharp_adjoint_check;
use crate::quantum::relations::{default_orders, verify_quantum_relation};
use crate::quantum::series::psi_q_difference_check;
use crate::surface::{corpus, naturality_square, Triangulation};
use crate::symbolic::{is_positive_laurent, TropicalInt};

/// Outcome class of a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    ExactPass,
    NumericPass,
    Fail,
}

impl Status {
    pub fn passed(self) -> bool {
        self != Status::Fail
    }
}

/// One named check with its residual and timing.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub detail: String,
    pub seconds: f64,
}

/// A check's verdict before it is named and timed.
struct Verdict {
    status: Status,
    residual: Option<f64>,
    tolerance: Option<f64>,
    detail: String,
}

fn exact(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { status: if ok { Status::ExactPass } else { Status::Fail }, residual: None, tolerance: None, detail: detail.into() }
}

fn numeric(residual: f64, tol: f64, detail: impl Into<String>) -> Verdict {
    let ok = residual.is_finite() && residual < tol;
    Verdict { status: if ok { Status::NumericPass } else { Status::Fail }, residual: Some(residual), tolerance: Some(tol), detail: detail.into() }
}

/// Which family of identities to verify.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// (σ∘μ)^{h+2} = id on X, A and D for the finite rank-2 types.
    Hgon,
    /// μ = μ′∘μ♯ on random feeds.
    Decompose,
    /// The maps between A × A°, D and X × X°, and the 2-form Ω.
    Double,
    /// Mutation differences of W in Λ²F*.
    K2,
    /// Ψ^q, closed forms of the quantum μ♯ and quantum (h+2)-gons.
    Quantum,
    /// The quantum dilogarithm property battery.
    Phi,
    /// Grid intertwiners: unitarity, commutation, relations, kernel G.
    Intertwine,
    /// Flips of ideal triangulations.
    Surface,
    /// Positivity of A-coordinates along random mutation words.
    Positivity,
}

impl Suite {
    pub const ALL: [Suite; 9] = [Suite::Hgon, Suite::Decompose, Suite::Double, Suite::K2, Suite::Quantum, Suite::Phi, Suite::Intertwine, Suite::Surface, Suite::Positivity];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Hgon => "hgon",
            Suite::Decompose => "decompose",
            Suite::Double => "double",
            Suite::K2 => "k2",
            Suite::Quantum => "quantum",
            Suite::Phi => "phi",
            Suite::Intertwine => "intertwine",
            Suite::Surface => "surface",
            Suite::Positivity => "positivity",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown suite `{s}`; expected one of hgon, decompose, double, k2, quantum, phi, intertwine, surface, positivity")))
    }
}

/// Tunables shared by the suites.
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    /// Planck constant; `None` means the suite's standard values.
    pub hbar: Option<f64>,
    /// Points per direction of the intertwiner grid.
    pub grid: usize,
    /// Overrides every numeric tolerance when set.
    pub tol: Option<f64>,
    pub seed: u64,
    /// Relation checked by the intertwiner suite (default: the pentagon).
    pub word: Option<ClusterTransformation>,
    /// Random feeds per randomized family.
    pub samples: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { hbar: None, grid: 512, tol: None, seed: 1, word: None, samples: 100 }
    }
}

impl SuiteOptions {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

type Job<'a> = (String, Box<dyn FnOnce() -> Result<Verdict> + Send + 'a>);

fn job<'a>(name: impl Into<String>, f: impl FnOnce() -> Result<Verdict> + Send + 'a) -> Job<'a> {
    (name.into(), Box::new(f))
}

/// Run every check of a suite; the outcomes are sorted by name.
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let jobs = match suite {
        Suite::Hgon => hgon_jobs(),
        Suite::Decompose => decompose_jobs(opts),
        Suite::Double => double_jobs(opts),
        Suite::K2 => k2_jobs(opts),
        Suite::Quantum => quantum_jobs(opts),
        Suite::Phi => phi_jobs(opts),
        Suite::Intertwine => intertwine_jobs(opts)?,
        Suite::Surface => surface_jobs(opts),
        Suite::Positivity => positivity_jobs(opts),
    };
    Ok(run_pool(jobs))
}

fn run_pool(jobs: Vec<Job<'_>>) -> Vec<CheckOutcome> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(jobs.len()).max(1);
    let queue = Mutex::new(jobs.into_iter().collect::<Vec<_>>());
    let results = Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let Some((name, f)) = queue.lock().unwrap().pop() else { break };
                let start = Instant::now();
                let verdict = f().unwrap_or_else(|e| Verdict { status: Status::Fail, residual: None, tolerance: None, detail: format!("error: {e}") });
                let outcome = CheckOutcome {
                    name,
                    status: verdict.status,
                    residual: verdict.residual,
                    tolerance: verdict.tolerance,
                    detail: verdict.detail,
                    seconds: start.elapsed().as_secs_f64(),
                };
                results.lock().unwrap().push(outcome);
            });
        }
    });
    let mut out = results.into_inner().unwrap();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

fn random_feeds(seed: u64, count: usize, ranks: std::ops::RangeInclusive<usize>, mults: &[i64]) -> Vec<Feed> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(ranks.clone());
            Feed::random(&mut rng, n, 2, mults)
        })
        .collect()
}

const SPACES: [Space; 3] = [Space::X, Space::A, Space::D];

fn hgon_jobs() -> Vec<Job<'static>> {
    (0..=3)
        .map(|p| {
            job(format!("hgon/p={p}"), move || {
                let t = ClusterTransformation::polygon_relation(p)?;
                let h = Feed::coxeter_number(p).unwrap_or(0);
                let mut failed = Vec::new();
                for space in SPACES {
                    if !t.substitution(space)?.is_identity() {
                        failed.push(format!("{space:?}"));
                    }
                }
                Ok(exact(failed.is_empty(), format!("{} steps (h + 2 = {}); non-identity on {failed:?}", t.steps.len(), h + 2)))
            })
        })
        .collect()
}

fn decompose_jobs(opts: &SuiteOptions) -> Vec<Job<'static>> {
    let (seed, count) = (opts.seed, opts.samples);
    SPACES
        .into_iter()
        .map(|space| {
            job(format!("decompose/{space:?}"), move || {
                let feeds = random_feeds(seed, count, 1..=5, &[1, 2, 3]);
                let mut checked = 0;
                let mut bad = Vec::new();
                for (i, f) in feeds.iter().enumerate() {
                    for k in 0..f.rank() {
                        let (sharp, prime) = decompose_mutation(space, f, k)?;
                        if !sharp.then(&prime)?.same_as(&mutation(space, f, k)?) {
                            bad.push((i, k));
                        }
                        checked += 1;
                    }
                }
                Ok(exact(bad.is_empty(), format!("{checked} (feed, k) pairs on {count} feeds of rank ≤ 5; failures {bad:?}")))
            })
        })
        .collect()
}

fn double_jobs(opts: &SuiteOptions) -> Vec<Job<'static>> {
    let (seed, count) = (opts.seed, opts.samples);
    let tol = opts.tol(1e-10);
    let feeds = move || random_feeds(seed.wrapping_add(7), count, 1..=4, &[1, 2]);
    let diagram = |name: &str, check: fn(&Feed) -> Result<bool>| -> Job<'static> {
        let name = name.to_string();
        job(format!("double/{name}"), move || {
            let fs = feeds();
            let bad: Vec<usize> = fs.iter().enumerate().filter_map(|(i, f)| (!check(f).unwrap_or(false)).then_some(i)).collect();
            Ok(exact(bad.is_empty(), format!("{} feeds; failing {bad:?}", fs.len())))
        })
    };
    let mut jobs = vec![
        diagram("phi-pi-equals-p-times-p", |f| Ok(map_phi(f).then(&map_pi(f))?.same_as(&map_p_times_p(f)))),
        diagram("pi-j-equals-diagonal", |f| Ok(map_j(f).then(&map_pi(f))?.same_as(&map_diagonal(f.rank())))),
        diagram("i-involution-swaps-pi", |f| {
            let i = map_i(f);
            let swapped = i.then(&map_pi(f))?.same_as(&map_pi(f).then(&map_swap(f.rank()))?);
            Ok(i.then(&i)?.is_identity() && swapped)
        }),
    ];
    for space in [Space::D, Space::A] {
        jobs.push(job(format!("double/omega-pullback-{space:?}"), move || {
            let fs = feeds();
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(11));
            let mut worst = 0.0f64;
            for f in &fs {
                let dim = space.nvars(f.rank());
                for _ in 0..10 {
                    let point: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.5..2.0)).collect();
                    for k in 0..f.rank() {
                        worst = worst.max(pullback_form_numeric(space, f, k, &point)?);
                    }
                }
            }
            Ok(numeric(worst, tol, format!("{} feeds × 10 positive points × all k", fs.len())))
        }));
    }
    jobs
}

fn k2_jobs(opts: &SuiteOptions) -> Vec<Job<'static>> {
    let (seed, count) = (opts.seed, opts.samples);
    let feeds = move || random_feeds(seed.wrapping_add(13), count, 1..=4, &[1, 2]);
    let mut jobs: Vec<Job<'static>> = Vec::new();
    for (idx, label) in ["mutation-difference", "sharp-difference", "monomial-invariance"].into_iter().enumerate() {
        jobs.push(job(format!("k2/D-{label}"), move || {
            let fs = feeds();
            let mut checked = 0;
            let mut bad = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                for k in 0..f.rank() {
                    if !steinberg_delta(f, k)?[idx].holds() {
                        bad.push((i, k));
                    }
                    checked += 1;
                }
            }
            Ok(exact(bad.is_empty(), format!("{checked} (feed, k) pairs; failures {bad:?}")))
        }));
    }
    for (idx, label) in ["sharp-difference", "monomial-invariance"].into_iter().enumerate() {
        jobs.push(job(format!("k2/A-{label}"), move || {
            let fs = feeds();
            let (mut checked, mut negated) = (0, 0);
            let mut bad = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                for k in 0..f.rank() {
                    let c = &steinberg_delta_a(f, k)?[idx];
                    if !c.holds() {
                        bad.push((i, k));
                        if c.actual.add(&c.expected).is_zero() {
                            negated += 1;
                        }
                    }
                    checked += 1;
                }
            }
            let note = if bad.is_empty() {
                String::new()
            } else {
                format!("; in {negated} of {} failures the actual difference is exactly the negative of the stated one", bad.len())
            };
            Ok(exact(bad.is_empty(), format!("{checked} (feed, k) pairs, {} failures{note}", bad.len())))
        }));
    }
    jobs
}

fn quantum_jobs(opts: &SuiteOptions) -> Vec<Job<'static>> {
    let tol = opts.tol(1e-8);
    let seed = opts.seed;
    let mut jobs = vec![
        job("quantum/psi-difference-order-20", || {
            let bad = psi_q_difference_check(20);
            Ok(exact(bad == 0, format!("{bad} failing degrees ≤ 20")))
        }),
        job("quantum/sharp-closed-forms-order-12", || {
            let mut bad = Vec::new();
            let mut checked = 0;
            for p in 0..=3 {
                let f = Feed::rank2(p);
                for k in 0..2 {
                    for space in [Space::X, Space::D] {
                        let c = sharp_adjoint_check(&f, k, space, 12)?;
                        checked += c.checked;
                        if !c.holds() {
                            bad.push(format!("p={p} k={k} {space:?}: {:?}", c.mismatches));
                        }
                    }
                }
            }
            Ok(exact(bad.is_empty(), format!("{checked} generator images on rank-2 feeds, X and D; {bad:?}")))
        }),
    ];
    for p in 0..=3 {
        for space in [Space::X, Space::D] {
            jobs.push(job(format!("quantum/hgon-p={p}-{space:?}"), move || {
                let t = ClusterTransformation::polygon_relation(p)?;
                let orders = default_orders(&t.source);
                let r = verify_quantum_relation(&t, space, &orders, seed)?;
                if r.exact == Some(true) {
                    return Ok(exact(r.returns_to_source, "all steps monomial: exact composite is the identity"));
                }
                let ns: Vec<usize> = r.runs.iter().map(|m| m.n).collect();
                Ok(numeric(r.max_residual().max(r.max_relation_residual()), tol, format!("matrix models at N = {ns:?}")))
            }));
        }
    }
    jobs
}

/// Identities of the battery; the A/B pairs are checked at every ℏ.
pub const PHI_IDENTITIES: [Property; 14] = {
    use Property::*;
    [A2, A3, A4, A5, A6, A8, A9, B2, B3, B4, B5, B6, B8, B9]
};

/// Limits checked as error-reduction trends.
pub const PHI_TRENDS: [Property; 3] = [Property::A1, Property::B0, Property::B1];

/// Standard Planck constants of the battery.
pub const PHI_HBARS: [f64; 4] = [0.3, 0.7, 1.0, 1.7];

fn phi_jobs(opts: &SuiteOptions) -> Vec<Job<'static>> {
    let hbars: Vec<f64> = opts.hbar.map(|h| vec![h]).unwrap_or_else(|| PHI_HBARS.to_vec());
    let tol = opts.tol(1e-7);
    let mut jobs = Vec::new();
    for &p in &PHI_IDENTITIES {
        let hs = hbars.clone();
        jobs.push(job(format!("phi/{}", p.name()), move || {
            let grid = default_grid();
            let mut worst = 0.0f64;
            let mut notes = Vec::new();
            for &h in &hs {
                let r = check_property(p, h, &grid, (2, 1))?;
                worst = worst.max(r.max_residual);
                notes.push(format!("ℏ={}: {:.1e}", r.hbar, r.max_residual));
            }
            Ok(numeric(worst, tol, notes.join(", ")))
        }));
    }
    let trend_hbar = opts.hbar.unwrap_or(0.7);
    for &p in &PHI_TRENDS {
        jobs.push(job(format!("phi/{}-trend", p.name()), move || {
            let r = check_property(p, trend_hbar, &default_grid(), (2, 1))?;
            let note = r.note.clone().map(|n| format!("; {n}")).unwrap_or_default();
            Ok(Verdict {
                status: if r.passed { Status::NumericPass } else { Status::Fail },
                residual: Some(r.max_residual),
                tolerance: None,
                detail: format!("smallest error ratio per refinement {:.4} (need ≥ 2); errors {:?}{note}", r.max_residual, r.errors),
            })
        }));
    }
    jobs
}

/// Name accepted by `--word` for the polygon relations.
pub fn named_word(name: &str) -> Result<ClusterTransformation> {
    let p = match name {
        "square" => 0,
        "pentagon" => 1,
        "hexagon" => 2,
        "octagon" => 3,
        _ => return Err(Error::InvalidParam(format!("unknown word `{name}`; expected square, pentagon, hexagon, octagon or a JSON file"))),
    };
    ClusterTransformation::polygon_relation(p)
}

fn intertwine_jobs(opts: &SuiteOptions) -> Result<Vec<Job<'static>>> {
    let hbar = opts.hbar.unwrap_or(0.7);
    let n = opts.grid;
    let word = match &opts.word {
        Some(w) => w.clone(),
        None => named_word("pentagon")?,
    };
    let (tol_u, tol_c, tol_l, tol_k) = (opts.tol(1e-6), opts.tol(1e-5), opts.tol(1e-3), opts.tol(1e-4));
    let mut jobs = Vec::new();
    for p in 0..=3 {
        jobs.push(job(format!("intertwine/unitarity-p={p}"), move || {
            let f = Feed::rank2(p);
            Ok(numeric(unitarity_defect(&f, hbar, n)?, tol_u, format!("‖Kg‖/‖g‖ − 1 over directions and Gaussians, grid {n}, ℏ = {hbar}")))
        }));
        jobs.push(job(format!("intertwine/commutation-p={p}"), move || {
            let f = Feed::rank2(p);
            let w = default_tests(2)?.remove(0);
            let mut worst = 0.0f64;
            let mut labels = Vec::new();
            for k in 0..2 {
                for item in CommutationItem::applicable(&f, k) {
                    if matches!(item, CommutationItem::Two | CommutationItem::XPower(_) | CommutationItem::TransverseX(_)) {
                        worst = worst.max(commutation_residual(&f, k, hbar, item, &w, n)?);
                        labels.push(format!("k={} {}", k + 1, item.label()));
                    }
                }
            }
            Ok(numeric(worst, tol_c, format!("items [2], [4], [8]: {}", labels.join("; "))))
        }));
    }
    jobs.push(job("intertwine/relation-scalar", move || {
        let r = verify_relation_numeric(&word, hbar, &default_tests(word.source.rank())?, n)?;
        let residual = r.abs_dev.max(r.phase_spread);
        let mut v = numeric(residual, tol_l, format!("λ = {:?}, ||λ|−1| = {:.2e}, phase spread {:.2e}, ‖Kw − λw‖ = {:.2e}", r.lambdas, r.abs_dev, r.phase_spread, r.deviation));
        if !r.closed {
            v.status = Status::Fail;
            v.detail.push_str("; the word does not return to its source feed");
        }
        Ok(v)
    }));
    jobs.push(job("intertwine/kernel-g-two-routes", move || {
        let mut worst = 0.0f64;
        for p in [1, 2] {
            let f = Feed::rank2(p);
            let w = default_tests(2)?.remove(0);
            for k in 0..2 {
                worst = worst.max(kernel_g_consistency(&f, k, hbar, &w, n)?);
            }
        }
        Ok(numeric(worst, tol_k, "grid K′∘(K♯)⁻¹ against the δ + G₁ integral kernel, p = 1, 2"))
    }));
    Ok(jobs)
}

fn surface_jobs(opts: &SuiteOptions) -> Vec<Job<'static>> {
    let tol = opts.tol(1e-8);
    let seed = opts.seed;
    let pentagons = || -> Result<Vec<(String, ClusterTransformation)>> {
        let mut out = Vec::new();
        for n in [5, 6, 7] {
            out.push((format!("disc-{n}"), Triangulation::polygon(n)?.pentagon_word(0, 1)?.transformation()?));
        }
        Ok(out)
    };
    vec![
        job("surface/naturality-square", || {
            let mut count = 0;
            let mut bad = Vec::new();
            for (name, t) in corpus() {
                match naturality_square(&t)? {
                    Ok(c) => count += c,
                    Err(e) => bad.push(format!("{name}: edge {e}")),
                }
            }
            Ok(exact(bad.is_empty(), format!("{count} flips over discs, annuli and the once-punctured torus; {bad:?}")))
        }),
        job("surface/pentagon-classical", move || {
            let mut bad = Vec::new();
            for (name, t) in pentagons()? {
                if !is_trivial_classical(&t)? {
                    bad.push(name);
                }
            }
            Ok(exact(bad.is_empty(), format!("identity substitution on X, A, D; failures {bad:?}")))
        }),
        job("surface/pentagon-tropical", move || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut bad = Vec::new();
            for (name, t) in pentagons()? {
                for _ in 0..20 {
                    let pt: Vec<i64> = (0..t.source.rank()).map(|_| rng.gen_range(-9..=9)).collect();
                    if apply_transformation(&t, Space::X, &TropicalInt, &pt)? != pt {
                        bad.push(format!("{name} at {pt:?}"));
                    }
                }
            }
            Ok(exact(bad.is_empty(), format!("20 integral tropical points per pentagon; failures {bad:?}")))
        }),
        job("surface/pentagon-quantum", move || {
            let mut worst = 0.0f64;
            for (_, t) in pentagons()? {
                let r = verify_quantum_relation(&t, Space::X, &default_orders(&t.source), seed)?;
                worst = worst.max(r.max_residual().max(r.max_relation_residual()));
            }
            Ok(numeric(worst, tol, "X-torus matrix models at N = 5, 7"))
        }),
    ]
}

fn positivity_jobs(opts: &SuiteOptions) -> Vec<Job<'static>> {
    let seed = opts.seed;
    let words = 2 * opts.samples;
    vec![job("positivity/a-coordinates", move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(17));
        let mut coords = 0;
        let mut bad = Vec::new();
        for w in 0..words {
            let n = rng.gen_range(1..=3);
            let mut feed = Feed::random(&mut rng, n, 2, &[1, 2]);
            let len = rng.gen_range(1..=8);
            let mut acc = Substitution::identity(Space::A.names(n));
            for _ in 0..len {
                let k = rng.gen_range(0..n);
                acc = acc.then(&mutation(Space::A, &feed, k)?)?;
                feed = feed.mutate(k)?;
                for r in &acc.images {
                    coords += 1;
                    if !is_positive_laurent(r) {
                        bad.push(w);
                    }
                }
            }
        }
        bad.dedup();
        Ok(exact(bad.is_empty(), format!("{words} words of length ≤ 8 on rank ≤ 3 feeds, {coords} coordinates; failing words {bad:?}")))
    })]
}

/// Sample point of a complex grid used by the CLI `phi eval` command.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    Complex64::from_str(s.trim()).map_err(|_| Error::Parse(format!("`{s}` is not a complex number (e.g. 0.5+0.25i)")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn hgon_suite_reports_four_exact_passes_sorted() {
        let out = run_suite(Suite::Hgon, &SuiteOptions::default()).unwrap();
        assert_eq!(out.len(), 4);
        assert!(out.iter().all(|c| c.status == Status::ExactPass), "{out:?}");
        assert!(out.windows(2).all(|w| w[0].name < w[1].name));
    }

    #[test]
    fn failing_checks_are_reported_not_swallowed() {
        let opts = SuiteOptions { samples: 5, ..Default::default() };
        let out = run_suite(Suite::K2, &opts).unwrap();
        let a = out.iter().find(|c| c.name == "k2/A-sharp-difference").unwrap();
        assert_eq!(a.status, Status::Fail);
        assert!(a.detail.contains("negative"), "{}", a.detail);
        assert!(out.iter().filter(|c| c.name.starts_with("k2/D")).all(|c| c.status == Status::ExactPass));
    }

    #[test]
    fn named_words() {
        assert_eq!(named_word("pentagon").unwrap().steps.len(), ClusterTransformation::polygon_relation(1).unwrap().steps.len());
        assert!(named_word("heptagon").is_err());
        assert_eq!(parse_complex("0.5+0.25i").unwrap(), Complex64::new(0.5, 0.25));
    }
}
