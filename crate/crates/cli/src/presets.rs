//! Shipped experiment presets (the JSON files under `presets/`).
//!
//! The expansive presets use a smoother scaled by 3, whose Lipschitz
//! constant is 3. With `gamma = 1 / (L + 2 tau)` fixed-step RED diverges on
//! them, RED with backtracking stalls, and monotone RED keeps decreasing.

use crate::config::{DenoiserSpec, ExperimentConfig, ImageSource, ProblemKind};

pub const PRESETS: [(&str, &str); 8] = [
    ("deblur_identity", include_str!("../presets/deblur_identity.json")),
    ("deblur_smoother", include_str!("../presets/deblur_smoother.json")),
    ("cs_smoother", include_str!("../presets/cs_smoother.json")),
    ("deblur_expansive", include_str!("../presets/deblur_expansive.json")),
    ("cs_expansive", include_str!("../presets/cs_expansive.json")),
    ("deblur_convnet", include_str!("../presets/deblur_convnet.json")),
    ("deblur_dct", include_str!("../presets/deblur_dct.json")),
    ("deblur_dct_exact", include_str!("../presets/deblur_dct_exact.json")),
];

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| ExperimentConfig::from_json(text).expect("shipped presets parse"))
}

/// The nonexpansive and expansive denoisers of the preset suite.
pub fn suite_denoisers() -> [(&'static str, DenoiserSpec); 2] {
    [
        ("nonexpansive", DenoiserSpec::named("smoother").expect("named preset")),
        ("expansive", DenoiserSpec::named("expansive_smoother").expect("named preset")),
    ]
}

/// One config per image x operator x tau x denoiser, all with `solver`.
pub fn suite(taus: &[f64], solver: &str, max_iters: usize) -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    for problem in [ProblemKind::Deblur, ProblemKind::Cs] {
        let base_name = match problem {
            ProblemKind::Deblur => "deblur_smoother",
            ProblemKind::Cs => "cs_smoother",
        };
        let base = preset(base_name).expect("shipped preset");
        for image in mred_core::imaging::TEST_IMAGE_NAMES {
            for &tau in taus {
                for (_, d) in suite_denoisers() {
                    let mut c = base.clone();
                    c.image = ImageSource::Preset(image.into());
                    c.tau = tau;
                    c.denoiser = d;
                    c.solver.name = solver.into();
                    c.solver.max_iters = Some(max_iters);
                    out.push(c);
                }
            }
        }
    }
    out
}
