mod common;

use polynet::trainer::{
    lattice_dataset, loss, loss_curve_csv, perturb, train, InitScheme, Loss, TrainConfig,
};
use polynet::{difference_indicator, union_indicator, Network, Space};

fn stationary(net: &Network, space: &Space) {
    let data = lattice_dataset(space, &common::lattice_box(), common::RESOLUTION).unwrap();
    assert!(loss(net, &data, Loss::Mse).unwrap() < 1e-6);
    let cfg = TrainConfig::new(Loss::Mse, 1e-3, 100, InitScheme::Manual(net.clone()), 0);
    let (_, curve) = train(net, &data, &cfg).unwrap();
    assert!(curve[0] < 1e-6);
    for w in curve.windows(2) {
        // the constructed minimum sits at rounding level, ~1e-30
        assert!(w[1] <= w[0] + 1e-24, "loss rose from {} to {}", w[0], w[1]);
    }
}

#[test]
fn constructed_minima_are_stationary_on_the_lattice() {
    let union = union_indicator(&common::two_triangles(), 0.5).unwrap();
    stationary(&union.network, &common::two_triangle_space());
    let plan = common::hexagon_minus_pentagon();
    let diff = difference_indicator(&plan, 0.5).unwrap();
    stationary(&diff.network, &Space::Difference(plan));
}

#[test]
fn equal_seeds_give_identical_curves() {
    let space = common::two_triangle_space();
    let data = lattice_dataset(&space, &common::lattice_box(), 20).unwrap();
    let start = perturb(
        &union_indicator(&common::two_triangles(), 0.5)
            .unwrap()
            .network,
        0.05,
        9,
    );
    let run = || {
        let cfg = TrainConfig::new(Loss::Mse, 0.005, 300, InitScheme::Manual(start.clone()), 9);
        let (net, curve) = train(&start, &data, &cfg).unwrap();
        (net.to_json(), loss_curve_csv(&curve))
    };
    assert_eq!(run(), run());
    for scheme in ["he_u", "xavier_n", "normal"] {
        let arch = union_indicator(&common::two_triangles(), 0.5)
            .unwrap()
            .network
            .architecture();
        let cfg = |seed| {
            TrainConfig::new(
                Loss::Mse,
                0.005,
                200,
                InitScheme::parse(scheme).unwrap(),
                seed,
            )
        };
        let go = |seed| {
            let init = polynet::trainer::init(&arch, &cfg(seed).init, seed).unwrap();
            let (_, curve) = train(&init, &data, &cfg(seed)).unwrap();
            loss_curve_csv(&curve)
        };
        assert_eq!(go(5), go(5), "{scheme}");
    }
}
