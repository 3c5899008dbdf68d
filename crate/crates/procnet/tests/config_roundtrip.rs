//! The config emitter and parser invert each other exactly.

use procnet::model::{
    parse_config, CommDelay, DelayModel, FusionDelay, NetworkConfig, PreprocessingModel,
    ScalarSystem,
};
use proptest::prelude::*;

fn preprocessing_strategy() -> impl Strategy<Value = PreprocessingModel> {
    prop_oneof![
        (1e-6..1e6f64).prop_map(|b| PreprocessingModel::InverseLinear { b }),
        (1e-6..1e6f64, 1e-3..10.0f64)
            .prop_map(|(b, gamma)| PreprocessingModel::InversePower { b, gamma }),
        (1e-6..1e6f64, 1e-3..10.0f64)
            .prop_map(|(b, gamma)| PreprocessingModel::Exponential { b, gamma }),
    ]
}

fn comm_strategy() -> impl Strategy<Value = CommDelay> {
    prop_oneof![
        Just(CommDelay::None),
        (0.0..100.0f64).prop_map(|tau_c| CommDelay::Constant { tau_c }),
        (1e-6..100.0f64).prop_map(|c| CommDelay::Compressing { c }),
    ]
}

fn fusion_strategy() -> impl Strategy<Value = FusionDelay> {
    prop_oneof![
        Just(FusionDelay::None),
        (0.0..100.0f64).prop_map(|tau_f| FusionDelay::Constant { tau_f }),
        (1e-6..100.0f64).prop_map(|f| FusionDelay::Compressing { f }),
    ]
}

fn config_strategy() -> impl Strategy<Value = NetworkConfig> {
    (
        -10.0..10.0f64,
        1e-6..1e6f64,
        -1e3..1e3f64,
        0.0..1e3f64,
        preprocessing_strategy(),
        comm_strategy(),
        fusion_strategy(),
        1u32..1000,
    )
        .prop_map(|(a, sigma2_w, mu0, p0, preprocessing, comm, fusion, sensors)| {
            NetworkConfig {
                system: ScalarSystem { a, sigma2_w, mu0, p0 },
                preprocessing,
                delays: DelayModel { comm, fusion },
                sensors,
            }
        })
}

proptest! {
    /// Serializing any valid config and parsing it back is the identity,
    /// field by field (floats included, via shortest round-trip notation).
    #[test]
    fn round_trip_is_identity(cfg in config_strategy()) {
        prop_assume!(cfg.validate().is_ok());
        let text = cfg.to_config_string();
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
