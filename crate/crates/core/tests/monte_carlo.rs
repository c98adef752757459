use infreg::analysis::{error_point, run_trials, Algorithm, BlockSize, Score, TrialSetup};
use infreg::blockwise::BlockMethod;
use infreg::clustering::likeness_gap;
use infreg::info::{EntropyProfile, Partition};
use infreg::model::{analytic_pixel_joint, Channel, ChannelModel, JointChannel, SceneModel};
use infreg::GroupSpec;

const SUBGROUP: GroupSpec = GroupSpec::RingSubgroup { order: 8 };

fn clustered(labels: Vec<usize>, channel: Channel, n: usize, group: GroupSpec) -> TrialSetup {
    let l = labels.iter().max().unwrap() + 1;
    TrialSetup {
        m: labels.len(),
        scenes: SceneModel::uniform(2, l).unwrap().with_assignment(labels).unwrap(),
        channels: ChannelModel::Iid(channel),
        group,
        n,
    }
}

#[test]
fn epsilon_like_with_the_analytic_gap() {
    let setup = clustered(vec![0, 1, 0, 1], Channel::bsc(0.1).unwrap(), 1024, SUBGROUP);
    let truth = Partition::from_labels(&[0, 1, 0, 1]);
    let pmf = analytic_pixel_joint(&setup.scenes, &truth, &setup.channels, &[true; 4]).unwrap();
    let epsilon = likeness_gap(&EntropyProfile::from_pmf(&pmf).unwrap(), &truth).unwrap().unwrap();
    let recs = run_trials(&setup, &Algorithm::EpsilonLike { epsilon }, 200, 101, "").unwrap();
    let p = error_point(1024, &recs, Score::Partition);
    assert!(p.rate <= 0.05, "{p:?}");
}

#[test]
fn k_info_two_clusters() {
    let setup = clustered(vec![0, 1, 0, 1], Channel::bsc(0.1).unwrap(), 512, SUBGROUP);
    let recs = run_trials(&setup, &Algorithm::KInfo { k: 2 }, 200, 102, "").unwrap();
    let p = error_point(512, &recs, Score::Partition);
    assert!(p.rate <= 0.05, "{p:?}");
}

#[test]
fn hierarchical_three_clusters() {
    let setup = clustered(vec![0, 1, 2, 0, 1], Channel::bsc(0.1).unwrap(), 1024, SUBGROUP);
    let recs = run_trials(&setup, &Algorithm::Hierarchical { k: 3 }, 200, 103, "").unwrap();
    let p = error_point(1024, &recs, Score::Partition);
    assert!(p.rate <= 0.05, "{p:?}");
}

#[test]
fn joint_registration_beats_pairwise_on_a_degraded_chain() {
    let bsc = Channel::bsc(0.1).unwrap();
    let setup = TrialSetup {
        scenes: SceneModel::uniform(2, 1).unwrap(),
        channels: ChannelModel::Joint(JointChannel::markov_chain(&[Channel::identity(2).unwrap(), bsc.clone(), bsc]).unwrap()),
        group: GroupSpec::Ring,
        m: 3,
        n: 64,
    };
    let z = Score::Image { index: 2 };
    let pairwise = error_point(64, &run_trials(&setup, &Algorithm::MmiPairwise, 5000, 104, "").unwrap(), z);
    let mm = error_point(64, &run_trials(&setup, &Algorithm::Mm, 5000, 104, "").unwrap(), z);
    let seq = error_point(64, &run_trials(&setup, &Algorithm::SequentialDegraded, 5000, 104, "").unwrap(), z);
    assert!(mm.hi < pairwise.lo, "mm {mm:?} pairwise {pairwise:?}");
    assert!(seq.hi < pairwise.lo, "sequential {seq:?} pairwise {pairwise:?}");
}

#[test]
fn blockwise_registration_of_thirty_two_images() {
    let n = (40.0 * 32f64.log2()).ceil() as usize;
    let setup = TrialSetup {
        scenes: SceneModel::uniform(2, 1).unwrap(),
        channels: ChannelModel::Iid(Channel::bsc(0.05).unwrap()),
        group: GroupSpec::Ring,
        m: 32,
        n,
    };
    let algorithm = Algorithm::Blockwise { block: BlockSize::Auto { c: 1.0 } };
    let recs = run_trials(&setup, &algorithm, 200, 105, "").unwrap();
    let p = error_point(32, &recs, algorithm.default_score());
    assert!(p.rate <= 0.10, "{p:?}");
}

#[test]
fn blockwise_clustering_of_two_well_separated_clusters() {
    let labels = vec![0, 1, 1, 0, 0, 0, 1, 1, 1, 0, 1, 0, 0, 1, 0, 1];
    let setup = clustered(labels, Channel::bsc(0.05).unwrap(), 1024, SUBGROUP);
    let algorithm = Algorithm::BlockwiseClustering { block: BlockSize::Fixed { k: 4 }, method: BlockMethod::KInfo { k: 2 } };
    let recs = run_trials(&setup, &algorithm, 100, 106, "").unwrap();
    let p = error_point(1024, &recs, Score::Partition);
    assert!(p.rate <= 0.10, "{p:?}");
    assert!(error_point(1024, &recs, Score::UpToShift).rate <= 0.10);
}
