//! Regenerates the stamped built-in suite under `data/suite-v1/`.
//!
//! Run with `cargo run -p mtea-core --example generate_suite`. The output is
//! a pure function of the constants below, so rerunning it must leave the
//! data directory unchanged.

use std::path::Path;

use mtea_core::problems::{
    format_transform_data, InstanceManifest, Rotation, TaskManifest, TransformData, SUITE_VERSION,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GENERATOR_SEED: u64 = 0x4d54_4541_4444_4e31;
const DIMENSION: usize = 10;
const TAIL: usize = DIMENSION - 1;
/// Tail coordinates shared by both optima on partial-intersection instances.
const SHARED_PREFIX: usize = TAIL / 2;

#[derive(Clone, Copy)]
struct TaskSpec {
    base: &'static str,
    shape: &'static str,
    bound: f64,
}

struct InstanceSpec {
    name: &'static str,
    tasks: [TaskSpec; 2],
}

const fn task(base: &'static str, shape: &'static str, bound: f64) -> TaskSpec {
    TaskSpec { base, shape, bound }
}

fn bound_of(base: &str) -> f64 {
    match base {
        "sphere" | "griewank" => 100.0,
        "ackley" => 32.0,
        _ => 5.0,
    }
}

fn specs() -> Vec<InstanceSpec> {
    let t = |base: &'static str, shape: &'static str| task(base, shape, bound_of(base));
    vec![
        InstanceSpec { name: "CIHS", tasks: [t("sphere", "convex"), t("sphere", "convex")] },
        InstanceSpec { name: "CIMS", tasks: [t("rosenbrock", "convex"), t("rosenbrock", "concave")] },
        InstanceSpec { name: "CILS", tasks: [t("rastrigin", "convex"), t("ackley", "convex")] },
        InstanceSpec { name: "PIHS", tasks: [t("rastrigin", "convex"), t("rastrigin", "convex")] },
        InstanceSpec { name: "PIMS", tasks: [t("ackley", "convex"), t("ackley", "convex")] },
        InstanceSpec { name: "PILS", tasks: [t("griewank", "convex"), t("ackley", "convex")] },
        InstanceSpec { name: "NIHS", tasks: [t("rosenbrock", "convex"), t("rosenbrock", "convex")] },
        InstanceSpec { name: "NIMS", tasks: [t("griewank", "concave"), t("griewank", "convex")] },
        InstanceSpec { name: "NILS", tasks: [t("meanabs", "convex"), t("ackley", "convex")] },
    ]
}

fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> Rotation {
    // Gram-Schmidt on uniform rows, twice for numerical orthogonality.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        for _ in 0..2 {
            for r in &rows {
                let dot: f64 = v.iter().zip(r).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(r).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-3 {
            rows.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    Rotation::from_rows(rows).expect("square")
}

fn displaced(rng: &mut ChaCha8Rng, v: f64) -> f64 {
    let delta = 0.15 + 0.15 * rng.gen::<f64>();
    if v + delta <= 0.9 {
        v + delta
    } else {
        v - delta
    }
}

fn main() -> std::io::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(SUITE_VERSION);
    for (index, spec) in specs().into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(GENERATOR_SEED ^ index as u64);
        let optimum1: Vec<f64> = (0..TAIL).map(|_| 0.2 + 0.6 * rng.gen::<f64>()).collect();
        let optimum2: Vec<f64> = match &spec.name[..2] {
            "CI" => optimum1.clone(),
            "PI" => optimum1
                .iter()
                .enumerate()
                .map(|(j, &v)| if j < SHARED_PREFIX { v } else { displaced(&mut rng, v) })
                .collect(),
            _ => optimum1.iter().map(|&v| displaced(&mut rng, v)).collect(),
        };
        let rotation1 = random_rotation(&mut rng, TAIL);
        let rotation2 = if &spec.name[2..] == "HS" {
            rotation1.clone()
        } else {
            random_rotation(&mut rng, TAIL)
        };

        let dir = root.join(spec.name);
        std::fs::create_dir_all(&dir)?;
        let mut tasks = Vec::new();
        for (k, (ts, (optimum, rotation))) in spec
            .tasks
            .iter()
            .zip([(&optimum1, &rotation1), (&optimum2, &rotation2)])
            .enumerate()
        {
            let shift: Vec<f64> = optimum.iter().map(|u| -ts.bound + 2.0 * ts.bound * u).collect();
            let file = format!("task{}.txt", k + 1);
            let data = TransformData { shift, rotation: rotation.clone() };
            let header = format!(
                "{SUITE_VERSION} {} task {}: shift (length {TAIL}) then {TAIL} rotation rows\n\
                 artifact-defined desk-scale constants",
                spec.name,
                k + 1
            );
            std::fs::write(dir.join(&file), format_transform_data(&data, &header))?;
            tasks.push(TaskManifest {
                base: ts.base.into(),
                shape: ts.shape.into(),
                dimension: DIMENSION,
                tail_lower: -ts.bound,
                tail_upper: ts.bound,
                transform: file,
            });
        }
        let manifest = InstanceManifest {
            name: spec.name.into(),
            suite_version: Some(SUITE_VERSION.into()),
            intersection: spec.name[..2].into(),
            similarity: spec.name[2..].into(),
            tasks,
        };
        let body = toml::to_string(&manifest).expect("manifest serializes");
        std::fs::write(
            dir.join("instance.toml"),
            format!("# generated by examples/generate_suite.rs; artifact-defined constants\n{body}"),
        )?;
    }
    Ok(())
}
