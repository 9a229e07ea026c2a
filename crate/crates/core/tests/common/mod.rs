//! Checks shared by the property, oracle and acceptance test targets. Each
//! returns `Err` with a description of the first violation found.

#![allow(dead_code)]

use naming_game::belief::SlidingWindowMemory;
use naming_game::engine::run_simulation_with;
use naming_game::metrics::{tcs_directed, tcs_montecarlo, tcs_pair, tcs_population_exact};
use naming_game::output::write_series;
use naming_game::{
    laps, BanditState, MeaningId, PolicyKind, Population, SimulationConfig, Vocabulary, WordId,
};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;
pub type NamedCheck = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn m(i: usize) -> MeaningId {
    MeaningId(i as u32)
}
fn w(i: usize) -> WordId {
    WordId(i as u32)
}

fn random_vocabulary<R: Rng>(
    rng: &mut R,
    n_meanings: usize,
    n_words: usize,
    density: f64,
) -> Vocabulary {
    let mut voc = Vocabulary::new(n_meanings, n_words);
    for i in 0..n_meanings {
        for j in 0..n_words {
            if rng.gen_bool(density) {
                voc.add_association(m(i), w(j));
            }
        }
    }
    voc
}

fn small_config(policy: PolicyKind, tau: usize) -> SimulationConfig {
    SimulationConfig {
        n_agents: 10,
        n_meanings: 5,
        n_words: 5,
        policy,
        tau,
        max_interactions: 20_000,
        measure_every: 100,
        mc_samples: 200,
        trials: 1,
        seed: 17,
        stop_on_convergence: true,
        ..SimulationConfig::default()
    }
}

// ---------------------------------------------------------------- properties

pub fn coding_and_decoding_are_normalized() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let (mm, ww) = (rng.gen_range(1..8), rng.gen_range(1..8));
        let density = rng.gen_range(0.0..0.6);
        let voc = random_vocabulary(&mut rng, mm, ww, density);
        for i in 0..mm {
            let s: f64 = voc.coding_distribution(m(i)).iter().map(|p| p.1).sum();
            let expected = if voc.is_known(m(i)) { 1.0 } else { 0.0 };
            ensure!((s - expected).abs() < 1e-12, "coding row {i} sums to {s}");
        }
        for j in 0..ww {
            let s: f64 = voc.decoding_distribution(w(j)).iter().map(|p| p.1).sum();
            let expected = if voc.column(w(j)).is_empty() {
                0.0
            } else {
                1.0
            };
            ensure!(
                (s - expected).abs() < 1e-12,
                "decoding column {j} sums to {s}"
            );
        }
    }
    Ok(())
}

pub fn success_leaves_unique_row_and_column() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..500 {
        let (mm, ww) = (rng.gen_range(1..8), rng.gen_range(1..8));
        let density = rng.gen_range(0.0..0.8);
        let mut voc = random_vocabulary(&mut rng, mm, ww, density);
        let (a, b) = (m(rng.gen_range(0..mm)), w(rng.gen_range(0..ww)));
        let before = voc.clone();
        voc.update_success(a, b);
        ensure!(voc.row(a) == [b], "row {a} is {:?}", voc.row(a));
        ensure!(voc.column(b) == [a], "column {b} is {:?}", voc.column(b));
        ensure!(voc.is_consistent(), "cross-indexes disagree");
        for (x, y) in before.pairs() {
            if x != a && y != b {
                ensure!(voc.contains(x, y), "unrelated pair ({x},{y}) was removed");
            }
        }
    }
    Ok(())
}

pub fn converged_state_is_absorbing() -> Check {
    for (policy, tau) in [
        (PolicyKind::Random, 2),
        (PolicyKind::LapsMax, 2),
        (PolicyKind::LapsMax, 5),
    ] {
        let cfg = small_config(policy, tau);
        let out = run_simulation_with(&cfg, 0, |_| {}).map_err(|e| e.to_string())?;
        ensure!(
            out.convergence_time.is_some(),
            "{policy} tau={tau} did not converge"
        );
        let mut pop = out.population;
        let frozen: Vec<Vocabulary> = pop.agents().iter().map(|a| a.voc.clone()).collect();
        for _ in 0..10_000 {
            let r = pop.run_interaction();
            ensure!(
                r.success,
                "{policy}: failure after convergence at t={}",
                r.t
            );
            ensure!(!r.invented, "{policy}: invention after convergence");
        }
        ensure!(
            pop.is_converged(),
            "{policy}: population left the converged state"
        );
        for (a, v) in pop.agents().iter().zip(&frozen) {
            ensure!(&a.voc == v, "{policy}: agent {} changed its lexicon", a.id);
        }
    }
    Ok(())
}

pub fn laps_stays_in_range_on_trajectories() -> Check {
    for (seed, tau) in [(3, 1), (4, 2), (5, 5), (6, 20)] {
        let cfg = SimulationConfig {
            n_agents: 8,
            n_meanings: 6,
            n_words: 6,
            tau,
            ..SimulationConfig::default()
        };
        let mut pop = Population::new(&cfg, ChaCha8Rng::seed_from_u64(seed));
        for _ in 0..3_000 {
            let r = pop.run_interaction();
            for i in [r.speaker, r.hearer] {
                let a = &pop.agents()[i];
                let v = a.laps();
                let cap = a.voc.known_count() as f64 / 6.0;
                ensure!(
                    v >= 0.0 && v <= cap + 1e-12,
                    "tau={tau} t={}: laps {v} outside [0, {cap}]",
                    r.t
                );
            }
        }
    }
    Ok(())
}

pub fn window_sums_track_append_counts() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for tau in [1usize, 2, 3, 7] {
        let mut mem = SlidingWindowMemory::new(tau, 4, 5);
        for _ in 0..400 {
            let (a, b) = (m(rng.gen_range(0..4)), w(rng.gen_range(0..5)));
            if rng.gen_bool(0.5) {
                mem.record_coding_observation(a, b);
            } else {
                mem.record_decoding_observation(b, a);
            }
            for i in 0..4 {
                let s: f64 = (0..5).map(|j| mem.approx_coding_value(m(i), w(j))).sum();
                let t = mem.coding_window(m(i)).appended().min(tau as u64) as f64;
                ensure!(
                    (s - t / tau as f64).abs() < 1e-12,
                    "coding row {i}: {s} vs {t}/{tau}"
                );
            }
            for j in 0..5 {
                let s: f64 = (0..4).map(|i| mem.approx_decoding_value(m(i), w(j))).sum();
                let t = mem.decoding_window(w(j)).appended().min(tau as u64) as f64;
                ensure!(
                    (s - t / tau as f64).abs() < 1e-12,
                    "decoding column {j}: {s} vs {t}/{tau}"
                );
            }
        }
    }
    Ok(())
}

pub fn bandit_probabilities_form_a_simplex() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..2_000 {
        let gamma = if rng.gen_bool(0.1) {
            1.0
        } else {
            rng.gen_range(1e-4..1.0)
        };
        let mut b = BanditState::new(gamma, rng.gen_range(1.0..50.0));
        for _ in 0..rng.gen_range(1..30) {
            let reward = if rng.gen_bool(0.4) {
                0.0
            } else {
                rng.gen_range(0.0..0.5)
            };
            b.update(m(rng.gen_range(0..40)), reward);
        }
        let p = b.probabilities().map_err(|e| e.to_string())?;
        let s: f64 = p.iter().map(|x| x.1).sum();
        ensure!((s - 1.0).abs() < 1e-12, "probabilities sum to {s}");
        ensure!(
            p.iter().all(|x| x.1 > 0.0),
            "non-positive arm probability in {p:?}"
        );
    }
    Ok(())
}

pub fn montecarlo_agrees_with_exact() -> Check {
    let samples = 2_000;
    let cfg = SimulationConfig {
        n_agents: 10,
        n_meanings: 6,
        n_words: 6,
        policy: PolicyKind::Random,
        ..SimulationConfig::default()
    };
    let mut pop = Population::new(&cfg, ChaCha8Rng::seed_from_u64(9));
    let mut probe = ChaCha8Rng::seed_from_u64(10);
    for step in 0..40 {
        for _ in 0..25 {
            pop.run_interaction();
        }
        let p = tcs_population_exact(pop.agents());
        let mc = tcs_montecarlo(pop.agents(), samples, &mut probe);
        let bound = 3.0 * (p * (1.0 - p) / samples as f64).sqrt() + 2.0 / pop.len() as f64;
        ensure!(
            (mc - p).abs() <= bound,
            "snapshot {step}: mc {mc} vs exact {p} (bound {bound})"
        );
    }
    Ok(())
}

pub fn replays_are_byte_identical() -> Check {
    for policy in [PolicyKind::Random, PolicyKind::LapsMax] {
        let cfg = SimulationConfig {
            stop_on_convergence: false,
            ..small_config(policy, 2)
        };
        let run = || {
            let mut records = Vec::new();
            let out = run_simulation_with(&cfg, 3, |r| records.push(format!("{r:?}"))).unwrap();
            let mut csv = Vec::new();
            write_series(&mut csv, &out.rows).unwrap();
            (records, csv)
        };
        let (ra, ca) = run();
        let (rb, cb) = run();
        ensure!(
            ra == rb,
            "{policy}: interaction records differ between replays"
        );
        ensure!(ca == cb, "{policy}: series bytes differ between replays");
    }
    Ok(())
}

pub const PROPERTIES: &[NamedCheck] = &[
    (
        "coding/decoding normalization",
        coding_and_decoding_are_normalized,
    ),
    (
        "post-success uniqueness",
        success_leaves_unique_row_and_column,
    ),
    ("absorbing converged state", converged_state_is_absorbing),
    ("LAPS within [0, K/M]", laps_stays_in_range_on_trajectories),
    (
        "window sums = min(T,tau)/tau",
        window_sums_track_append_counts,
    ),
    (
        "bandit simplex and positivity",
        bandit_probabilities_form_a_simplex,
    ),
    ("Monte Carlo vs exact TCS", montecarlo_agrees_with_exact),
    ("byte-identical replays", replays_are_byte_identical),
];

// -------------------------------------------------------------------- oracle
//
// Dense rational re-evaluation of the coding/decoding, TCS, LAPS and update
// formulas on 2 meanings x 2 words, compared against the sparse float code.

const DIM: usize = 2;
type Dense = [[i64; DIM]; DIM];

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn to_f64(x: Rational64) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

fn all_dense() -> impl Iterator<Item = Dense> {
    (0..16u32).map(|bits| {
        let mut d = [[0; DIM]; DIM];
        for k in 0..4 {
            d[k / DIM][k % DIM] = ((bits >> k) & 1) as i64;
        }
        d
    })
}

fn to_voc(d: &Dense) -> Vocabulary {
    let pairs = (0..DIM).flat_map(|i| (0..DIM).map(move |j| (i, j)));
    Vocabulary::from_pairs(
        DIM,
        DIM,
        pairs
            .filter(|&(i, j)| d[i][j] == 1)
            .map(|(i, j)| (m(i), w(j))),
    )
}

fn coding(d: &Dense) -> [[Rational64; DIM]; DIM] {
    let mut c = [[r(0, 1); DIM]; DIM];
    for i in 0..DIM {
        let s: i64 = d[i].iter().sum();
        for j in 0..DIM {
            if s > 0 {
                c[i][j] = r(d[i][j], s);
            }
        }
    }
    c
}

fn decoding(d: &Dense) -> [[Rational64; DIM]; DIM] {
    let mut out = [[r(0, 1); DIM]; DIM];
    for j in 0..DIM {
        let s: i64 = (0..DIM).map(|i| d[i][j]).sum();
        for i in 0..DIM {
            if s > 0 {
                out[i][j] = r(d[i][j], s);
            }
        }
    }
    out
}

fn directed(c: &[[Rational64; DIM]; DIM], dd: &[[Rational64; DIM]; DIM]) -> Rational64 {
    let mut s = r(0, 1);
    for i in 0..DIM {
        for j in 0..DIM {
            s += c[i][j] * dd[i][j];
        }
    }
    s / r(DIM as i64, 1)
}

fn close(a: f64, b: Rational64) -> bool {
    (a - to_f64(b)).abs() < 1e-12
}

pub fn oracle_tcs_directed() -> Check {
    for a in all_dense() {
        for b in all_dense() {
            let (va, vb) = (to_voc(&a), to_voc(&b));
            let ab = directed(&coding(&a), &decoding(&b));
            let ba = directed(&coding(&b), &decoding(&a));
            ensure!(close(tcs_directed(&va, &vb), ab), "directed {a:?} -> {b:?}");
            ensure!(
                close(tcs_pair(&va, &vb), (ab + ba) / r(2, 1)),
                "pair {a:?} <-> {b:?}"
            );
        }
    }
    Ok(())
}

pub fn oracle_population_tcs() -> Check {
    // N = 3: the exact population value must equal the expected success of
    // an interaction between two agents drawn independently and uniformly
    // (self-pairs included), which is a plain average over the 9 pairs.
    let dense: Vec<Dense> = all_dense().collect();
    for a in &dense {
        for b in &dense {
            for c in &dense {
                let agents = [a, b, c];
                let mut expect = r(0, 1);
                for s in agents {
                    for h in agents {
                        expect += directed(&coding(s), &decoding(h));
                    }
                }
                expect /= r(9, 1);
                let vocs: Vec<Vocabulary> = agents.iter().map(|d| to_voc(d)).collect();
                ensure!(
                    close(tcs_population_exact(&vocs), expect),
                    "population {agents:?}"
                );
            }
        }
    }
    Ok(())
}

/// Every ordered window content of length at most `tau` over `DIM` symbols.
fn windows(tau: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..tau {
        let mut next = Vec::new();
        for win in &frontier {
            for s in 0..DIM {
                let mut v: Vec<usize> = win.clone();
                v.push(s);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn oracle_laps() -> Check {
    let tau = 2usize;
    let wins = windows(tau);
    for d in all_dense() {
        let voc = to_voc(&d);
        let (c, dd) = (coding(&d), decoding(&d));
        for c0 in &wins {
            for c1 in &wins {
                for d0 in &wins {
                    for d1 in &wins {
                        let mut mem = SlidingWindowMemory::new(tau, DIM, DIM);
                        let mut ac = [[r(0, 1); DIM]; DIM];
                        let mut ad = [[r(0, 1); DIM]; DIM];
                        for (i, win) in [c0, c1].into_iter().enumerate() {
                            for &j in win {
                                mem.record_coding_observation(m(i), w(j));
                                ac[i][j] += r(1, tau as i64);
                            }
                        }
                        for (j, win) in [d0, d1].into_iter().enumerate() {
                            for &i in win {
                                mem.record_decoding_observation(w(j), m(i));
                                ad[i][j] += r(1, tau as i64);
                            }
                        }
                        let expect = (directed(&c, &ad) + directed(&ac, &dd)) / r(2, 1);
                        ensure!(
                            close(laps(&voc, &mem), expect),
                            "voc {d:?}, coding windows {c0:?} {c1:?}, decoding windows {d0:?} {d1:?}"
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn oracle_update_success() -> Check {
    for d in all_dense() {
        for i in 0..DIM {
            for j in 0..DIM {
                let mut expect = d;
                expect[i] = [0; DIM];
                for row in expect.iter_mut() {
                    row[j] = 0;
                }
                expect[i][j] = 1;
                let mut voc = to_voc(&d);
                voc.update_success(m(i), w(j));
                ensure!(voc == to_voc(&expect), "update_success({i},{j}) on {d:?}");
            }
        }
    }
    Ok(())
}

pub const ORACLES: &[NamedCheck] = &[
    ("directed and pair TCS", oracle_tcs_directed),
    ("population TCS, N=3", oracle_population_tcs),
    ("LAPS, every window state at tau=2", oracle_laps),
    ("Minimal NG success update", oracle_update_success),
];
