//! Self-verification suites run by `infreg verify`.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use infreg::analysis::{type_class_brute_force, type_class_from_counts, whittle_brute_force, whittle_count};
use infreg::info::{entropy_bits, EntropyProfile, JointHistogram, JointPmf, Partition, INFO_TOL};
use infreg::model::kl_bits;
use infreg::registration::mmi_objectives;
use infreg::{Image, Transform, TransformGroup};

use crate::error::CliError;

pub type EntropyFn = fn(&[f64]) -> f64;

pub const SUITES: [&str; 8] = [
    "group_axioms",
    "permutation_algebra",
    "chain_rules",
    "submodularity",
    "whittle",
    "type_classes",
    "mmi_joint_entropy",
    "permutation_invariance",
];

const TOL: f64 = 1e-9;
const KEPT_FAILURES: usize = 5;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Entropy functional used to build profiles in the information suites.
    pub entropy: EntropyFn,
    pub seed: u64,
    /// Instances for the MMI / joint-entropy equivalence suite.
    pub mmi_instances: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { entropy: entropy_bits, seed: 0x1f2e_3d4c, mmi_instances: 1000 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failed: usize,
    /// First few failure messages.
    pub failures: Vec<String>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failed == 0 && self.checks > 0
    }
}

#[derive(Default)]
struct Tally {
    checks: usize,
    failed: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(msg());
            }
        }
    }

    fn ok<T>(&mut self, r: infreg::Result<T>, what: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(false, || format!("{}: {e}", what()));
                None
            }
        }
    }
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<SuiteReport, CliError> {
    let (name, f): (&'static str, fn(&VerifyOptions, &mut Tally)) = match name {
        "group_axioms" => ("group_axioms", group_axioms),
        "permutation_algebra" => ("permutation_algebra", permutation_algebra),
        "chain_rules" => ("chain_rules", chain_rules),
        "submodularity" => ("submodularity", submodularity),
        "whittle" => ("whittle", whittle),
        "type_classes" => ("type_classes", type_classes),
        "mmi_joint_entropy" => ("mmi_joint_entropy", mmi_joint_entropy),
        "permutation_invariance" => ("permutation_invariance", permutation_invariance),
        other => return Err(CliError::Argument(format!("unknown suite \"{other}\"; known: {}", SUITES.join(", ")))),
    };
    let start = Instant::now();
    let mut t = Tally::default();
    f(opts, &mut t);
    Ok(SuiteReport { name, checks: t.checks, failed: t.failed, failures: t.failures, seconds: start.elapsed().as_secs_f64() })
}

pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteReport> {
    SUITES.iter().map(|s| run_suite(s, opts).expect("known suite")).collect()
}

fn rng(opts: &VerifyOptions, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(opts.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Transform {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    Transform::new(v).expect("shuffled indices form a permutation")
}

fn random_pixels(rng: &mut ChaCha8Rng, n: usize, r: usize) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..r as u8)).collect()
}

/// Random pmf with roughly a quarter of the cells zeroed.
fn random_pmf(rng: &mut ChaCha8Rng) -> JointPmf {
    let m = rng.gen_range(2..=4);
    let r = rng.gen_range(2..=3usize);
    let size = r.pow(m as u32);
    loop {
        let w: Vec<f64> = (0..size).map(|_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen::<f64>() }).collect();
        let s: f64 = w.iter().sum();
        if s > 0.0 {
            let p = w.iter().map(|v| v / s).collect();
            if let Ok(pmf) = JointPmf::new(vec![r; m], p) {
                return pmf;
            }
        }
    }
}

fn group_axioms(_: &VerifyOptions, t: &mut Tally) {
    for n in 1..=16 {
        if let Some(g) = t.ok(TransformGroup::ring(n), || format!("ring({n})")) {
            let rep = g.verify();
            t.check(rep.all_pass() && g.len() == n, || format!("ring({n}): {rep:?}"));
        }
        for order in (1..=n).filter(|d| n % d == 0) {
            if let Some(g) = t.ok(TransformGroup::ring_subgroup(n, order), || format!("ring_subgroup({n}, {order})")) {
                let rep = g.verify();
                t.check(rep.all_pass() && g.len() == order, || format!("ring_subgroup({n}, {order}): {rep:?}"));
            }
        }
    }
    for h in 1..=5 {
        for w in 1..=5 {
            if let Some(g) = t.ok(TransformGroup::torus(h, w), || format!("torus({h}, {w})")) {
                let rep = g.verify();
                t.check(rep.all_pass() && g.len() == h * w, || format!("torus({h}, {w}): {rep:?}"));
            }
        }
    }
    // a set that is not closed must be caught
    for n in 3..=8 {
        let set = TransformGroup::from_elements(vec![Transform::identity(n), Transform::shift(n, 1)]);
        if let Some(g) = t.ok(set, || format!("{{id, shift}} on {n}")) {
            let rep = g.verify();
            t.check(!rep.closure && !rep.all_pass(), || format!("closure failure on {n} pixels not detected"));
        }
    }
}

fn permutation_algebra(opts: &VerifyOptions, t: &mut Tally) {
    let mut rng = rng(opts, 2);
    for _ in 0..500 {
        let n = rng.gen_range(1..64);
        let p = random_permutation(&mut rng, n);
        let q = random_permutation(&mut rng, n);
        let x = random_pixels(&mut rng, n, 5);
        let lhs = p.apply(&q.apply(&x).expect("length")).expect("length");
        let rhs = q.compose(&p).expect("length").apply(&x).expect("length");
        t.check(lhs == rhs, || format!("apply/compose law on n={n}"));
        t.check(p.compose(&p.inverse()).expect("length").is_identity(), || format!("p.p^-1 != id on n={n}"));
        t.check(p.inverse().inverse() == p, || format!("inverse not an involution on n={n}"));
        let c = p.cycle_structure();
        let covered = c.cycles.iter().map(Vec::len).sum::<usize>() + c.identity_block.len();
        t.check(covered == n && c.cycles.iter().all(|cy| cy.len() >= 2), || format!("cycle lengths cover {covered} of {n}"));
    }
}

fn product_of_marginals(pmf: &JointPmf) -> Vec<f64> {
    let dims = pmf.dims();
    let marginals: Vec<Vec<f64>> = (0..dims.len()).map(|j| pmf.marginal_mask(1 << j)).collect();
    (0..pmf.probs().len())
        .map(|mut code| {
            let mut q = 1.0;
            for (j, &d) in dims.iter().enumerate() {
                q *= marginals[j][code % d];
                code /= d;
            }
            q
        })
        .collect()
}

fn chain_rules(opts: &VerifyOptions, t: &mut Tally) {
    let mut rng = rng(opts, 3);
    for i in 0..500 {
        let pmf = random_pmf(&mut rng);
        let Some(prof) = t.ok(EntropyProfile::from_pmf_with(&pmf, opts.entropy), || format!("pmf {i}")) else { continue };
        let m = prof.m();
        let Some(im) = t.ok(prof.multiinformation(), || format!("pmf {i}")).map(|v| v.value) else { continue };
        // multiinformation is the divergence from the product of marginals, in bits
        let kl = kl_bits(pmf.probs(), &product_of_marginals(&pmf));
        t.check((im - kl).abs() <= TOL, || format!("pmf {i}: I_M = {im}, KL = {kl}"));
        let mut sum = 0.0;
        for j in 1..m {
            let past = (1u32 << j) - 1;
            sum += prof.h(past) + prof.h(1 << j) - prof.h(past | 1 << j);
        }
        t.check((im - sum).abs() <= TOL, || format!("pmf {i}: I_M = {im}, chain sum {sum}"));
        for p in Partition::enumerate(m).filter(|p| p.len() > 1) {
            let masks = p.masks();
            let k = masks.len();
            let mut sum = 0.0;
            for a in 0..k - 1 {
                let rest = masks[a + 1..].iter().fold(0, |x, y| x | y);
                sum += prof.h(masks[a]) + prof.h(rest) - prof.h(masks[a] | rest);
            }
            let (Some(ip), Some(ic)) = (
                t.ok(prof.partition_information(&p), || format!("pmf {i}, {p}")),
                t.ok(prof.cluster_information(&p), || format!("pmf {i}, {p}")),
            ) else {
                continue;
            };
            t.check((ip.value - sum / (k - 1) as f64).abs() <= TOL, || format!("pmf {i}, {p}: I_P chain rule"));
            t.check((ip.value - (im - ic.value) / (k - 1) as f64).abs() <= TOL, || format!("pmf {i}, {p}: I_P vs I_M, I_C"));
        }
    }
}

fn submodularity(opts: &VerifyOptions, t: &mut Tally) {
    let mut rng = rng(opts, 4);
    for i in 0..500 {
        let pmf = random_pmf(&mut rng);
        let Some(prof) = t.ok(EntropyProfile::from_pmf_with(&pmf, opts.entropy), || format!("pmf {i}")) else { continue };
        let full = prof.full_mask();
        let mut ok = true;
        for a in 0..=full {
            for b in 0..=full {
                ok &= prof.h(a) + prof.h(b) + TOL >= prof.h(a | b) + prof.h(a & b);
                if a & b == a {
                    ok &= prof.h(a) <= prof.h(b) + TOL;
                }
            }
        }
        t.check(ok, || format!("pmf {i} ({} coordinates) violates submodularity or monotonicity", prof.m()));
    }
}

fn whittle(_: &VerifyOptions, t: &mut Tally) {
    let mut grid = |r: usize, max_total: u64| {
        let cells = r * r;
        for total in 0..=max_total {
            let mut counts = vec![0u64; cells];
            loop {
                if counts.iter().sum::<u64>() == total {
                    let f: Vec<Vec<u64>> = counts.chunks(r).map(<[u64]>::to_vec).collect();
                    for u in 0..r {
                        for v in 0..r {
                            let got = whittle_count(&f, u, v);
                            let want = whittle_brute_force(&f, u, v);
                            match (got, want) {
                                (Ok(g), Ok(w)) => t.check(g == w.into(), || format!("F={f:?} u={u} v={v}: {g} != {w}")),
                                (g, w) => t.check(false, || format!("F={f:?} u={u} v={v}: {g:?} / {w:?}")),
                            }
                        }
                    }
                }
                // odometer over counts in 0..=total
                let mut j = 0;
                while j < cells {
                    counts[j] += 1;
                    if counts[j] <= total {
                        break;
                    }
                    counts[j] = 0;
                    j += 1;
                }
                if j == cells {
                    break;
                }
            }
        }
    };
    grid(2, 8);
    grid(3, 3);
}

fn type_classes(_: &VerifyOptions, t: &mut Tally) {
    let mut one = |counts: &[u64]| match (type_class_from_counts(counts), type_class_brute_force(counts)) {
        (Ok(tc), Ok(brute)) => {
            t.check(tc.count == brute.into(), || format!("{counts:?}: {} != {brute}", tc.count));
            t.check(tc.lower_holds && tc.upper_holds, || format!("{counts:?}: size bounds violated"));
        }
        (a, b) => t.check(false, || format!("{counts:?}: {:?} / {:?}", a.err(), b.err())),
    };
    for n in 0..=12u64 {
        for k in 0..=n {
            one(&[k, n - k]);
        }
    }
    for n in 1..=9u64 {
        for a in 0..=n {
            for b in 0..=n - a {
                one(&[a, b, n - a - b]);
            }
        }
    }
}

fn mmi_joint_entropy(opts: &VerifyOptions, t: &mut Tally) {
    let mut rng = rng(opts, 7);
    for i in 0..opts.mmi_instances {
        let r = rng.gen_range(2..=4usize);
        let n = rng.gen_range(64..=512usize);
        let noise = rng.gen_range(0.0..1.0);
        let shift = rng.gen_range(0..n);
        let x = random_pixels(&mut rng, n, r);
        let y: Vec<u8> = (0..n).map(|p| if rng.gen_bool(noise) { rng.gen_range(0..r as u8) } else { x[(p + shift) % n] }).collect();
        let (Ok(x), Ok(y), Ok(g)) = (Image::new(r, x), Image::new(r, y), TransformGroup::ring(n)) else {
            t.check(false, || format!("instance {i}: setup failed"));
            continue;
        };
        let Some((mi, hj)) = t.ok(mmi_objectives(&x, &y, &g), || format!("instance {i}")) else { continue };
        let best = mi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let least = hj.iter().copied().fold(f64::INFINITY, f64::min);
        // exact optima, and the tie sets the search itself uses
        for tol in [0.0, INFO_TOL] {
            let argmax: Vec<usize> = (0..mi.len()).filter(|&k| mi[k] >= best - tol).collect();
            let argmin: Vec<usize> = (0..hj.len()).filter(|&k| hj[k] <= least + tol).collect();
            t.check(argmax == argmin, || format!("instance {i} (r={r}, n={n}, tol {tol}): argmax {argmax:?} vs argmin {argmin:?}"));
        }
    }
}

fn permutation_invariance(opts: &VerifyOptions, t: &mut Tally) {
    let mut rng = rng(opts, 8);
    for i in 0..200 {
        let n = rng.gen_range(4..128);
        let m = rng.gen_range(2..=4);
        let r = rng.gen_range(2..=4);
        let sigma = random_permutation(&mut rng, n);
        let images: Vec<Image> = (0..m).map(|_| Image::new(r, random_pixels(&mut rng, n, r)).expect("in range")).collect();
        let moved: Vec<Image> = images.iter().map(|im| im.transformed(&sigma).expect("length")).collect();
        let a = JointHistogram::untransformed(&images).and_then(|h| h.profile());
        let b = JointHistogram::untransformed(&moved).and_then(|h| h.profile());
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let same = a.table().iter().zip(b.table()).all(|(u, v)| u.to_bits() == v.to_bits());
                t.check(same, || format!("instance {i}: profiles differ after a common permutation"));
            }
            (a, b) => t.check(false, || format!("instance {i}: {:?} / {:?}", a.err(), b.err())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyOptions {
        VerifyOptions { mmi_instances: 20, ..VerifyOptions::default() }
    }

    #[test]
    fn every_suite_passes() {
        for r in run_all(&quick()) {
            assert!(r.passed(), "{}: {:?}", r.name, r.failures);
        }
    }

    #[test]
    fn natural_log_entropy_is_caught() {
        let opts = VerifyOptions { entropy: |p| p.iter().filter(|&&v| v > 0.0).map(|v| -v * v.ln()).sum(), ..quick() };
        let r = run_suite("chain_rules", &opts).unwrap();
        assert!(!r.passed());
        assert!(r.failures[0].contains("KL"), "{:?}", r.failures);
    }

    #[test]
    fn unknown_suite_is_an_argument_error() {
        assert_eq!(run_suite("nope", &quick()).unwrap_err().exit_code(), 1);
    }
}
