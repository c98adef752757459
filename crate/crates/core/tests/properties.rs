use infreg::info::{EntropyProfile, JointHistogram, JointPmf, Partition};
use infreg::registration::{mmi_objectives, register_mm, register_mmi_pair};
use infreg::{Image, Transform, TransformGroup};
use proptest::prelude::*;

fn permutation(n: usize) -> impl Strategy<Value = Transform> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Transform::new(v).unwrap())
}

fn pixels(n: usize, r: usize) -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(0..r as u8, n)
}

fn pmf(m: usize, r: usize) -> impl Strategy<Value = JointPmf> {
    proptest::collection::vec(0.0f64..1.0, r.pow(m as u32)).prop_filter_map("all-zero weights", move |w| {
        let s: f64 = w.iter().sum();
        (s > 0.0).then(|| {
            let mut p: Vec<f64> = w.iter().map(|v| v / s).collect();
            // exact normalization of the last entry
            let rest: f64 = p[..p.len() - 1].iter().sum();
            *p.last_mut().unwrap() = (1.0 - rest).max(0.0);
            JointPmf::new(vec![r; m], p).unwrap()
        })
    })
}

fn pmf_any() -> impl Strategy<Value = JointPmf> {
    (2usize..=4, 2usize..=3).prop_flat_map(|(m, r)| pmf(m, r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn apply_of_apply_is_apply_of_composition(
        (p, q, x) in (1usize..40).prop_flat_map(|n| (permutation(n), permutation(n), pixels(n, 4)))
    ) {
        let lhs = p.apply(&q.apply(&x).unwrap()).unwrap();
        let rhs = q.compose(&p).unwrap().apply(&x).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_is_an_involution_and_cancels(p in (1usize..40).prop_flat_map(permutation)) {
        prop_assert_eq!(p.inverse().inverse(), p.clone());
        prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        prop_assert!(p.inverse().compose(&p).unwrap().is_identity());
    }

    #[test]
    fn cycle_lengths_and_fixed_points_cover_every_index(p in (1usize..60).prop_flat_map(permutation)) {
        let c = p.cycle_structure();
        let covered: usize = c.cycles.iter().map(Vec::len).sum::<usize>() + c.identity_block.len();
        prop_assert_eq!(covered, p.len());
        prop_assert!(c.cycles.iter().all(|cy| cy.len() >= 2));
        prop_assert_eq!(c.cycle_count(), c.cycles.len());
    }

    #[test]
    fn ring_and_torus_groups_pass_the_axioms(h in 1usize..6, w in 1usize..6) {
        prop_assert!(TransformGroup::ring(h * w).unwrap().verify().all_pass());
        prop_assert!(TransformGroup::torus(h, w).unwrap().verify().all_pass());
    }

    #[test]
    fn multiinformation_chain_rule(pmf in pmf_any()) {
        let prof = EntropyProfile::from_pmf(&pmf).unwrap();
        let m = prof.m();
        let mut sum = 0.0;
        for i in 1..m {
            let past = (1u32 << i) - 1;
            sum += prof.h(past) + prof.h(1 << i) - prof.h(past | 1 << i);
        }
        let im = prof.multiinformation().unwrap().value;
        prop_assert!((im - sum).abs() <= 1e-9, "{} vs {}", im, sum);
    }

    #[test]
    fn partition_information_chain_rule(pmf in pmf_any()) {
        let prof = EntropyProfile::from_pmf(&pmf).unwrap();
        let m = prof.m();
        for p in Partition::enumerate(m).filter(|p| p.len() > 1) {
            let masks = p.masks();
            let k = masks.len();
            let mut sum = 0.0;
            for i in 0..k - 1 {
                let rest = masks[i + 1..].iter().fold(0, |a, b| a | b);
                sum += prof.h(masks[i]) + prof.h(rest) - prof.h(masks[i] | rest);
            }
            let ip = prof.partition_information(&p).unwrap().value;
            prop_assert!((ip - sum / (k - 1) as f64).abs() <= 1e-9);
            // cluster information identity
            let ic = prof.cluster_information(&p).unwrap().value;
            let im = prof.multiinformation().unwrap().value;
            prop_assert!((ip - (im - ic) / (k - 1) as f64).abs() <= 1e-9);
        }
    }

    #[test]
    fn entropy_is_submodular(pmf in pmf_any()) {
        let prof = EntropyProfile::from_pmf(&pmf).unwrap();
        let full = prof.full_mask();
        for a in 0..=full {
            for b in 0..=full {
                let lhs = prof.h(a) + prof.h(b);
                let rhs = prof.h(a | b) + prof.h(a & b);
                prop_assert!(lhs + 1e-9 >= rhs, "H({:b})+H({:b}) < H(union)+H(intersection)", a, b);
            }
        }
    }

    #[test]
    fn plug_in_functionals_ignore_a_common_pixel_permutation(
        (sigma, xs) in (4usize..48).prop_flat_map(|n| (permutation(n), proptest::collection::vec(pixels(n, 3), 3)))
    ) {
        let images: Vec<Image> = xs.iter().map(|p| Image::new(3, p.clone()).unwrap()).collect();
        let moved: Vec<Image> = images.iter().map(|im| im.transformed(&sigma).unwrap()).collect();
        let a = JointHistogram::untransformed(&images).unwrap().profile().unwrap();
        let b = JointHistogram::untransformed(&moved).unwrap().profile().unwrap();
        // identical histograms sum in the same order, so equality is bitwise
        prop_assert_eq!(a.table(), b.table());
    }

    #[test]
    fn mmi_argmax_set_is_joint_entropy_argmin_set(
        (x, y) in (2usize..5, 8usize..64).prop_flat_map(|(r, n)| (pixels(n, r), pixels(n, r)).prop_map(move |p| (r, p)))
            .prop_map(|(r, (a, b))| (Image::new(r, a).unwrap(), Image::new(r, b).unwrap()))
    ) {
        let g = TransformGroup::ring(x.len()).unwrap();
        let (mi, hj) = mmi_objectives(&x, &y, &g).unwrap();
        let best = mi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let least = hj.iter().copied().fold(f64::INFINITY, f64::min);
        let argmax: Vec<usize> = (0..mi.len()).filter(|&k| mi[k] == best).collect();
        let argmin: Vec<usize> = (0..hj.len()).filter(|&k| hj[k] == least).collect();
        prop_assert_eq!(argmax, argmin);
    }

    #[test]
    fn mm_on_two_images_is_pairwise_mmi(
        (x, y) in (8usize..48).prop_flat_map(|n| (pixels(n, 2), pixels(n, 2)))
    ) {
        let x = Image::new(2, x).unwrap();
        let y = Image::new(2, y).unwrap();
        let g = TransformGroup::ring(x.len()).unwrap();
        prop_assert_eq!(register_mm(&[x.clone(), y.clone()], &g).unwrap(), register_mmi_pair(&x, &y, &g).unwrap());
    }
}

#[test]
fn partition_functionals_reject_mismatched_partitions() {
    let pmf = JointPmf::new(vec![2, 2], vec![0.25; 4]).unwrap();
    let prof = EntropyProfile::from_pmf(&pmf).unwrap();
    assert!(prof.partition_information(&Partition::singletons(3)).is_err());
    assert!(prof.partition_information(&Partition::single_block(2)).is_err());
}
