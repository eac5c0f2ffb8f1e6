//! Seeded synthetic defect data: Gaussian blob / XOR probe sets for
//! classifier checks and planted-signal multi-project repositories for
//! desk-scale pipeline runs.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::data::{ModuleRecord, ProjectRelease};
use crate::error::Result;
use crate::seed;

/// Standard normal draw via Box-Muller; deterministic for a given stream.
pub fn standard_normal(rng: &mut ChaCha12Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn record(id: String, features: Vec<f64>, label: bool) -> ModuleRecord {
    ModuleRecord {
        id,
        features,
        loc: 100,
        label,
    }
}

/// Two 2-D Gaussian blobs, defective centred at `centers.1`.
pub fn gaussian_blobs(
    n: usize,
    centers: ((f64, f64), (f64, f64)),
    sigma: f64,
    seed_value: u64,
) -> Vec<ModuleRecord> {
    let mut rng = seed::rng(seed_value, &[0xB1]);
    (0..n)
        .map(|i| {
            let defective = i % 2 == 1;
            let (cx, cy) = if defective { centers.1 } else { centers.0 };
            let x = cx + sigma * standard_normal(&mut rng);
            let y = cy + sigma * standard_normal(&mut rng);
            record(format!("blob:{i}"), vec![x, y], defective)
        })
        .collect()
}

/// Four clusters in XOR arrangement: diagonal corners share a class, so no
/// linear separator beats ~0.75 accuracy.
pub fn xor_pattern(n_per_cluster: usize, sigma: f64, seed_value: u64) -> Vec<ModuleRecord> {
    let corners = [
        ((0.0, 0.0), false),
        ((1.0, 1.0), false),
        ((0.0, 1.0), true),
        ((1.0, 0.0), true),
    ];
    let mut rng = seed::rng(seed_value, &[0xB2]);
    let mut records = Vec::with_capacity(4 * n_per_cluster);
    for (cluster, ((cx, cy), label)) in corners.iter().enumerate() {
        for i in 0..n_per_cluster {
            let x = cx + sigma * standard_normal(&mut rng);
            let y = cy + sigma * standard_normal(&mut rng);
            records.push(record(format!("xor:{cluster}:{i}"), vec![x, y], *label));
        }
    }
    records
}

/// Generation profile for one planted-signal release.
#[derive(Debug, Clone)]
pub struct ReleaseProfile {
    pub modules: usize,
    pub n_features: usize,
    /// Probability that a module is defective.
    pub defect_rate: f64,
    /// Mean shift added to defective modules on the signal features.
    pub class_shift: f64,
    /// How many leading features carry the class signal.
    pub signal_features: usize,
    /// Per-project distribution offset applied to every feature, modelling
    /// the cross-project domain gap.
    pub project_offset: f64,
}

impl Default for ReleaseProfile {
    fn default() -> Self {
        ReleaseProfile {
            modules: 300,
            n_features: 8,
            defect_rate: 0.25,
            class_shift: 2.0,
            signal_features: 4,
            project_offset: 0.0,
        }
    }
}

/// One release with Gaussian metrics, label-dependent mean shifts, and
/// size metadata correlated with defectiveness.
pub fn generate_release(
    project: &str,
    release_id: &str,
    profile: &ReleaseProfile,
    seed_value: u64,
) -> ProjectRelease {
    let mut rng = seed::rng(seed_value, &[0xB3]);
    let mut modules = Vec::with_capacity(profile.modules);
    for i in 0..profile.modules {
        let defective = rng.gen_bool(profile.defect_rate);
        let mut features = Vec::with_capacity(profile.n_features);
        for f in 0..profile.n_features {
            let mut v = profile.project_offset + standard_normal(&mut rng);
            if defective && f < profile.signal_features {
                v += profile.class_shift;
            }
            features.push(v);
        }
        let base_loc = rng.gen_range(20..1500);
        let loc = if defective { base_loc + 200 } else { base_loc };
        modules.push(ModuleRecord {
            id: format!("{project}:{release_id}:{i}"),
            features,
            loc,
            label: defective,
        });
    }
    // a bootstrap-trainable release needs both classes; force one of each
    if modules.iter().all(|m| !m.label) {
        modules[0].label = true;
    }
    if modules.iter().all(|m| m.label) {
        modules[0].label = false;
    }

    ProjectRelease {
        project_name: project.to_string(),
        release_id: release_id.to_string(),
        metric_names: (0..profile.n_features).map(|f| format!("m{f}")).collect(),
        modules,
    }
}

/// Writes a release in the canonical CSV layout (name, metrics, loc, bugs).
/// Defective modules get small positive bug counts so loading exercises
/// the count binarization.
pub fn write_release_csv(release: &ProjectRelease, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("name");
    for metric in &release.metric_names {
        out.push(',');
        out.push_str(metric);
    }
    out.push_str(",loc,bugs\n");
    for (i, module) in release.modules.iter().enumerate() {
        out.push_str(&module.id.replace(':', "_"));
        for value in &module.features {
            out.push_str(&format!(",{value:.4}"));
        }
        let bugs = if module.label { 1 + i % 3 } else { 0 };
        out.push_str(&format!(",{},{}\n", module.loc, bugs));
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}
