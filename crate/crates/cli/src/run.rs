//! Command line surface and dispatch.
//!
//! Exit codes: 0 when every pass flag holds, 1 when a check ran and
//! failed, 2 for unusable configuration (bad flags, caps exceeded,
//! unsupported parameter ranges). The worker pool is built once here;
//! integer results never depend on its size because every parallel
//! reduction in the core is associative and commutative, and sampled
//! runs take the worker count as an explicit argument.

use crate::acceptance::{self, Profile};
use crate::report::{Format, Report};
use clap::{Parser, Subcommand};
use ffs_core::field::{Elem, Field};
use ffs_core::geometry::{sphere, sphere_size_formula, Space};
use ffs_core::graph::{build_graph, check_ramanujan_bound, NormColoring};
use ffs_core::mixing::{
    count_colored_copies, count_colored_stars, edge_discrepancy, neighborhood_variance,
    sample_colored_copies, PatternGraph, VertexSet,
};
use ffs_core::rng::SplitMix64;
use ffs_core::scheme::{build_omega, scheme_report, verify_distance_relation};
use ffs_core::simplex::{
    census_exact, census_sampled, edge_norm_vector, main_theorem_experiment, proof_pipeline,
    sample_simplex, verify_congruence_lemma,
};
use ffs_core::spectra::multiset_close;
use ffs_core::Caps;
use serde::Deserialize;
use serde_json::{json, Value};
use std::error::Error;
use std::path::PathBuf;
use std::time::Instant;

const DEFAULT_WORK_CAP: u64 = 1_000_000_000;

#[derive(Parser)]
#[command(
    name = "ffs",
    version,
    about = "Exact spectral and counting experiments over small finite fields"
)]
pub struct Cli {
    /// Base seed; every randomized stage derives its own substream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel enumeration.
    #[arg(long, global = true, default_value_t = 4)]
    pub workers: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Work cap for enumerations; overrides the FFS_CAP environment
    /// variable, which overrides the built-in default.
    #[arg(long, global = true)]
    pub cap: Option<u64>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Build F_q and verify its character and square tables.
    FieldCheck {
        #[arg(long)]
        q: u64,
    },
    /// Count the sphere of norm a by scan, optionally against the formula.
    Sphere {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        a: Elem,
        /// Also evaluate the closed-form count and compare.
        #[arg(long)]
        formula: bool,
    },
    /// Spectrum of the distance-a graph via character sums.
    Spectrum {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        a: Elem,
        /// Cross-check against dense eigendecomposition.
        #[arg(long)]
        dense: bool,
    },
    /// Variance and discrepancy inequalities on seeded random subsets.
    Mixing {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
        /// Single color; omitted means every a in F_q.
        #[arg(long)]
        a: Option<Elem>,
        #[arg(long, default_value_t = 100)]
        trials: u32,
    },
    /// Count colored stars of the given type.
    Stars {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
        /// Comma-separated leaf colors, for example 1,1,2.
        #[arg(long = "type", value_delimiter = ',', required = true)]
        star_type: Vec<usize>,
        /// Subset density in (0,1]; omitted means the full space.
        #[arg(long)]
        density: Option<f64>,
    },
    /// Count colored copies of a pattern graph read from a JSON file.
    Copies {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
        /// JSON file: {"s": 3, "edges": [[0,1,1],[0,2,1],[1,2,2]]}.
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        density: Option<f64>,
        /// Estimate from this many samples instead of exact counting.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Build the line scheme and verify its structure.
    Scheme {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
    },
    /// Census of congruence classes realized by tuples from a point set.
    Census {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        /// Seeded subset size; omitted means the full space.
        #[arg(long)]
        points: Option<u64>,
        /// Sampled mode with this budget; omitted means exact.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Edge-norm equality versus exhaustive isometry search on tuple pairs.
    CongruenceCheck {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100)]
        pairs: u32,
    },
    /// Full staged construction: stars, best center, spheres, lines, ends.
    Pipeline {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: usize,
        #[arg(long = "type", value_delimiter = ',', required = true)]
        star_type: Vec<Elem>,
        #[arg(long)]
        density: Option<f64>,
    },
    /// Sampled census on a seeded subset against the density hypothesis.
    MainTheorem {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Run the acceptance suite.
    Accept {
        #[arg(long, value_enum, default_value_t = Profile::Quick)]
        profile: Profile,
    },
}

type BoxError = Box<dyn Error + Send + Sync>;
type RunResult = Result<Report, BoxError>;

pub fn execute(cli: Cli) -> i32 {
    let started = Instant::now();
    let workers = cli.workers.max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("ffs: worker pool: {e}");
            return 2;
        }
    };
    let caps = match resolve_caps(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("ffs: {e}");
            return 2;
        }
    };
    let outcome = pool.install(|| dispatch(&cli, &caps));
    let code = match outcome {
        Ok(report) => {
            if let Err(e) = report.emit(cli.format, cli.out.as_deref()) {
                eprintln!("ffs: writing report: {e}");
                return 2;
            }
            if report.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("ffs: {e}");
            2
        }
    };
    eprintln!("wall_ms={}", started.elapsed().as_millis());
    code
}

fn resolve_caps(cli: &Cli) -> Result<Caps, BoxError> {
    let work = match (cli.cap, std::env::var("FFS_CAP")) {
        (Some(cap), _) => cap,
        (None, Ok(s)) => s
            .parse::<u64>()
            .map_err(|_| format!("FFS_CAP must be an unsigned integer, got {s:?}"))?,
        (None, Err(_)) => DEFAULT_WORK_CAP,
    };
    Ok(Caps::with_work(work))
}

fn global_config(cli: &Cli, caps: &Caps) -> Value {
    json!({
        "seed": cli.seed,
        "workers": cli.workers.max(1),
        "cap": caps.work,
    })
}

fn merge(base: Value, extra: Value) -> Value {
    let (Value::Object(mut a), Value::Object(b)) = (base, extra) else {
        unreachable!("configs are objects");
    };
    a.extend(b);
    Value::Object(a)
}

fn dispatch(cli: &Cli, caps: &Caps) -> RunResult {
    let global = global_config(cli, caps);
    match &cli.cmd {
        Cmd::FieldCheck { q } => field_check(*q, global),
        Cmd::Sphere { q, d, a, formula } => sphere_cmd(*q, *d, *a, *formula, caps, global),
        Cmd::Spectrum { q, d, a, dense } => spectrum_cmd(*q, *d, *a, *dense, caps, global),
        Cmd::Mixing { q, d, a, trials } => mixing_cmd(*q, *d, *a, *trials, cli.seed, caps, global),
        Cmd::Stars { q, d, star_type, density } => {
            stars_cmd(*q, *d, star_type, *density, cli.seed, caps, global)
        }
        Cmd::Copies { q, d, pattern, density, samples } => copies_cmd(
            *q,
            *d,
            pattern,
            *density,
            *samples,
            cli.seed,
            cli.workers.max(1),
            caps,
            global,
        ),
        Cmd::Scheme { q, d } => scheme_cmd(*q, *d, caps, global),
        Cmd::Census { q, d, k, points, samples } => census_cmd(
            *q,
            *d,
            *k,
            *points,
            *samples,
            cli.seed,
            cli.workers.max(1),
            caps,
            global,
        ),
        Cmd::CongruenceCheck { q, d, pairs } => {
            congruence_cmd(*q, *d, *pairs, cli.seed, caps, global)
        }
        Cmd::Pipeline { q, k, star_type, density } => {
            pipeline_cmd(*q, *k, star_type, *density, cli.seed, caps, global)
        }
        Cmd::MainTheorem { q, k, density, samples } => main_theorem_cmd(
            *q,
            *k,
            *density,
            *samples,
            cli.seed,
            cli.workers.max(1),
            caps,
            global,
        ),
        Cmd::Accept { profile } => accept_cmd(*profile, global),
    }
}

fn space_for(q: u64, d: usize) -> Result<Space, BoxError> {
    Ok(Space::new(Field::from_order(q)?, d)?)
}

/// Seeded point set: the whole space, or a subset of the given density
/// drawn from a substream no worker-indexed stream collides with.
fn point_set(space: &Space, density: Option<f64>, seed: u64) -> Result<Vec<u64>, BoxError> {
    match density {
        None => Ok((0..space.n()).collect()),
        Some(rho) => {
            if !(rho > 0.0 && rho <= 1.0) {
                return Err(format!("density must lie in (0,1], got {rho}").into());
            }
            let size = ((rho * space.n() as f64).round() as u64).clamp(1, space.n());
            let mut rng = SplitMix64::substream(seed, u64::MAX);
            Ok(rng.subset(space.n(), size as usize).into_iter().map(u64::from).collect())
        }
    }
}

fn field_check(q: u64, global: Value) -> RunResult {
    let f = Field::from_order(q)?;
    // FNV-1a over the character table, one byte per element.
    let mut checksum: u64 = 0xcbf29ce484222325;
    for a in 0..q {
        let byte = match f.chi(a) {
            1 => 1u8,
            -1 => 2u8,
            _ => 0u8,
        };
        checksum ^= byte as u64;
        checksum = checksum.wrapping_mul(0x100000001b3);
    }
    let mut chi_multiplicative = true;
    for a in 0..q {
        for b in 0..q {
            if f.chi(f.mul(a, b)) != f.chi(a) * f.chi(b) {
                chi_multiplicative = false;
            }
        }
    }
    let mut sqrt_ok = true;
    let mut squares = 0u64;
    for a in 0..q {
        if let Some(r) = f.sqrt(a) {
            squares += 1;
            sqrt_ok &= f.sq(r) == a;
            sqrt_ok &= r <= f.neg(r) || a == 0;
        } else {
            sqrt_ok &= f.chi(a) == -1;
        }
    }
    // nu generates the unit group: no power before q-1 returns to 1.
    let mut pow = f.nu();
    let mut order = 1u64;
    while pow != 1 {
        pow = f.mul(pow, f.nu());
        order += 1;
    }
    let generator_ok = order == q - 1;
    let pass = chi_multiplicative && sqrt_ok && generator_ok && squares == (q + 1) / 2;
    Ok(Report {
        command: "field-check",
        config: merge(global, json!({"q": q})),
        metrics: json!({
            "q": q,
            "p": f.p(),
            "e": f.e(),
            "modulus": f.modulus(),
            "nu": f.nu(),
            "char_table_checksum": format!("{checksum:016x}"),
            "chi_multiplicative": chi_multiplicative,
            "sqrt_ok": sqrt_ok,
            "generator_ok": generator_ok,
            "square_count": squares,
        }),
        pass,
    })
}

fn sphere_cmd(q: u64, d: usize, a: Elem, formula: bool, caps: &Caps, global: Value) -> RunResult {
    let space = space_for(q, d)?;
    let scan = sphere(&space, a, caps)?.points.len() as u128;
    let mut metrics = serde_json::Map::new();
    metrics.insert("size_enumerated".into(), serde_json::to_value(ffs_core::Count(scan))?);
    let mut pass = true;
    if formula {
        let predicted = sphere_size_formula(space.field(), d, a);
        let agree = predicted == scan;
        metrics
            .insert("size_formula".into(), serde_json::to_value(ffs_core::Count(predicted))?);
        metrics.insert("agree".into(), agree.into());
        pass = agree;
    }
    Ok(Report {
        command: "sphere",
        config: merge(global, json!({"q": q, "d": d, "a": a, "formula": formula})),
        metrics: Value::Object(metrics),
        pass,
    })
}

fn spectrum_cmd(q: u64, d: usize, a: Elem, dense: bool, caps: &Caps, global: Value) -> RunResult {
    let space = space_for(q, d)?;
    let graph = build_graph(&space, a, caps)?;
    let rep = graph.character_spectrum()?;
    let (bound_holds, margin) = check_ramanujan_bound(&rep);
    let mut metrics = serde_json::Map::new();
    metrics.insert("character".into(), serde_json::to_value(&rep)?);
    metrics.insert("bound_holds".into(), bound_holds.into());
    metrics.insert("bound_margin".into(), margin.into());
    let mut pass = true;
    if dense {
        let dense_rep = graph.dense_spectrum()?;
        let agree = multiset_close(
            &graph.character_eigenvalues_sorted()?,
            &graph.dense_eigenvalues_sorted()?,
            1e-6,
        );
        metrics.insert("dense".into(), serde_json::to_value(&dense_rep)?);
        metrics.insert("agree".into(), agree.into());
        pass = agree;
    }
    Ok(Report {
        command: "spectrum",
        config: merge(global, json!({"q": q, "d": d, "a": a, "dense": dense})),
        metrics: Value::Object(metrics),
        pass,
    })
}

fn mixing_cmd(
    q: u64,
    d: usize,
    a: Option<Elem>,
    trials: u32,
    seed: u64,
    caps: &Caps,
    global: Value,
) -> RunResult {
    let space = space_for(q, d)?;
    let colors: Vec<Elem> = match a {
        Some(one) => vec![one],
        None => (0..q).collect(),
    };
    let mut rows = Vec::new();
    let mut pass = true;
    for &color in &colors {
        let graph = build_graph(&space, color, caps)?;
        let n = graph.n() as usize;
        let mut variance_violations = 0u32;
        let mut discrepancy_violations = 0u32;
        for t in 0..trials {
            let mut rng = SplitMix64::substream(seed, (color as u64) << 32 | t as u64);
            let b = VertexSet::random(n, 1 + rng.below(n as u64 - 1) as usize, &mut rng);
            let c = VertexSet::random(n, 1 + rng.below(n as u64 - 1) as usize, &mut rng);
            if !neighborhood_variance(&graph, &b)?.holds {
                variance_violations += 1;
            }
            if !edge_discrepancy(&graph, &b, &c)?.holds {
                discrepancy_violations += 1;
            }
        }
        pass &= variance_violations == 0 && discrepancy_violations == 0;
        rows.push(json!({
            "a": color,
            "valency": graph.valency(),
            "lambda_bound": graph.lambda_bound(),
            "trials": trials,
            "variance_violations": variance_violations,
            "discrepancy_violations": discrepancy_violations,
        }));
    }
    Ok(Report {
        command: "mixing",
        config: merge(global, json!({"q": q, "d": d, "a": a, "trials": trials})),
        metrics: json!({"graphs": rows}),
        pass,
    })
}

fn stars_cmd(
    q: u64,
    d: usize,
    star_type: &[usize],
    density: Option<f64>,
    seed: u64,
    caps: &Caps,
    global: Value,
) -> RunResult {
    let space = space_for(q, d)?;
    let coloring = NormColoring::new(&space, caps)?;
    let members: Vec<u32> = point_set(&space, density, seed)?.iter().map(|&x| x as u32).collect();
    let set = VertexSet::new(members);
    let leaves = vec![set.clone(); star_type.len()];
    let report = count_colored_stars(&coloring, &set, &leaves, star_type, caps)?;
    Ok(Report {
        command: "stars",
        config: merge(
            global,
            json!({"q": q, "d": d, "type": star_type, "density": density, "set_size": set.len()}),
        ),
        metrics: serde_json::to_value(&report)?,
        pass: true,
    })
}

#[derive(Deserialize)]
struct PatternFile {
    s: usize,
    edges: Vec<(usize, usize, usize)>,
}

#[allow(clippy::too_many_arguments)]
fn copies_cmd(
    q: u64,
    d: usize,
    pattern_path: &PathBuf,
    density: Option<f64>,
    samples: Option<u64>,
    seed: u64,
    workers: usize,
    caps: &Caps,
    global: Value,
) -> RunResult {
    let text = std::fs::read_to_string(pattern_path)
        .map_err(|e| format!("pattern file {}: {e}", pattern_path.display()))?;
    let file: PatternFile =
        serde_json::from_str(&text).map_err(|e| format!("pattern file: {e}"))?;
    let pattern = PatternGraph::new(file.s, file.edges)?;
    let space = space_for(q, d)?;
    let coloring = NormColoring::new(&space, caps)?;
    let members: Vec<u32> = point_set(&space, density, seed)?.iter().map(|&x| x as u32).collect();
    let sets = vec![VertexSet::new(members); pattern.s];
    let metrics = match samples {
        None => serde_json::to_value(count_colored_copies(&coloring, &pattern, &sets, caps)?)?,
        Some(budget) => serde_json::to_value(sample_colored_copies(
            &coloring, &pattern, &sets, budget, seed, workers,
        )?)?,
    };
    Ok(Report {
        command: "copies",
        config: merge(
            global,
            json!({
                "q": q, "d": d, "pattern": pattern_path.display().to_string(),
                "density": density, "samples": samples,
            }),
        ),
        metrics,
        pass: true,
    })
}

fn scheme_cmd(q: u64, d: usize, caps: &Caps, global: Value) -> RunResult {
    let scheme = build_omega(&space_for(q, d)?, caps)?;
    let report = scheme_report(&scheme)?;
    let distance = verify_distance_relation(&scheme);
    let pass = report.partition_ok && report.symmetry_ok && distance.ok;
    Ok(Report {
        command: "scheme",
        config: merge(global, json!({"q": q, "d": d})),
        metrics: json!({
            "scheme": serde_json::to_value(&report)?,
            "distance": serde_json::to_value(&distance)?,
        }),
        pass,
    })
}

#[allow(clippy::too_many_arguments)]
fn census_cmd(
    q: u64,
    d: usize,
    k: usize,
    points: Option<u64>,
    samples: Option<u64>,
    seed: u64,
    workers: usize,
    caps: &Caps,
    global: Value,
) -> RunResult {
    let space = space_for(q, d)?;
    let e: Vec<u64> = match points {
        None => (0..space.n()).collect(),
        Some(size) => {
            if size == 0 || size > space.n() {
                return Err(format!("points must lie in 1..={}", space.n()).into());
            }
            let mut rng = SplitMix64::substream(seed, u64::MAX);
            rng.subset(space.n(), size as usize).into_iter().map(u64::from).collect()
        }
    };
    let result = match samples {
        None => census_exact(&space, &e, k, caps)?,
        Some(budget) => census_sampled(&space, &e, k, budget, seed, workers, caps)?,
    };
    let mut metrics = serde_json::to_value(&result)?;
    // Large realized lists dominate the report; keep them only when small.
    if result.count > 4096 {
        metrics
            .as_object_mut()
            .expect("census serializes to an object")
            .insert("realized".into(), Value::Null);
    }
    Ok(Report {
        command: "census",
        config: merge(
            global,
            json!({"q": q, "d": d, "k": k, "points": points, "samples": samples}),
        ),
        metrics,
        pass: true,
    })
}

fn congruence_cmd(
    q: u64,
    d: usize,
    pairs: u32,
    seed: u64,
    caps: &Caps,
    global: Value,
) -> RunResult {
    let space = space_for(q, d)?;
    if d < 2 {
        return Err("congruence-check needs d >= 2".into());
    }
    let k = d - 1;
    let f = space.field().clone();
    let maps = ffs_core::geometry::enumerate_orthogonal(&space, true, caps)?;
    let mut agreements = 0u32;
    let mut disagreements = Vec::new();
    for i in 0..pairs {
        let mut rng = SplitMix64::substream(seed, i as u64);
        let a = sample_simplex(&space, k, &mut rng, true)?;
        let b = if i % 2 == 0 {
            let o = &maps[rng.below(maps.len() as u64) as usize];
            let shift = space.decode(rng.below(space.n()));
            a.iter()
                .map(|&x| space.encode(&space.add_points(&o.apply(&f, &space.decode(x)), &shift)))
                .collect::<Vec<u64>>()
        } else {
            sample_simplex(&space, k, &mut rng, true)?
        };
        let env_equal = edge_norm_vector(&space, &a)? == edge_norm_vector(&space, &b)?;
        let congruent = verify_congruence_lemma(&space, &a, &b, caps)?;
        if env_equal == congruent {
            agreements += 1;
        } else if disagreements.len() < 8 {
            disagreements.push(json!({
                "pair": i, "a": a, "b": b, "env_equal": env_equal, "congruent": congruent,
            }));
        }
    }
    let pass = agreements == pairs;
    Ok(Report {
        command: "congruence-check",
        config: merge(global, json!({"q": q, "d": d, "k": k, "pairs": pairs})),
        metrics: json!({
            "pairs": pairs,
            "agreements": agreements,
            "disagreements": disagreements,
        }),
        pass,
    })
}

fn pipeline_cmd(
    q: u64,
    k: usize,
    star_type: &[Elem],
    density: Option<f64>,
    seed: u64,
    caps: &Caps,
    global: Value,
) -> RunResult {
    if k < 2 {
        return Err("pipeline needs k >= 2".into());
    }
    let space = space_for(q, 2 * k - 1)?;
    let e = point_set(&space, density, seed)?;
    let report = proof_pipeline(&space, &e, k, star_type, seed, caps)?;
    let pass = report.on_sphere_ok && report.unit_norm_ok && report.half_ok && report.positive;
    Ok(Report {
        command: "pipeline",
        config: merge(
            global,
            json!({"q": q, "k": k, "type": star_type, "density": density}),
        ),
        metrics: serde_json::to_value(&report)?,
        pass,
    })
}

#[allow(clippy::too_many_arguments)]
fn main_theorem_cmd(
    q: u64,
    k: usize,
    density: f64,
    samples: u64,
    seed: u64,
    workers: usize,
    caps: &Caps,
    global: Value,
) -> RunResult {
    let report = main_theorem_experiment(q, k, density, samples, seed, workers, caps)?;
    let pass = report.census_count > 0;
    Ok(Report {
        command: "main-theorem",
        config: merge(
            global,
            json!({"q": q, "k": k, "density": density, "samples": samples}),
        ),
        metrics: serde_json::to_value(&report)?,
        pass,
    })
}

fn accept_cmd(profile: Profile, global: Value) -> RunResult {
    let results = acceptance::run_all(profile);
    let mut pass = true;
    let mut rows = Vec::new();
    // The running commentary goes to stderr so stdout stays parseable.
    for r in &results {
        eprintln!("{}", r.line());
        pass &= r.pass;
        rows.push(serde_json::to_value(r)?);
    }
    Ok(Report {
        command: "accept",
        config: merge(global, json!({"profile": profile.name()})),
        metrics: json!({"criteria": rows}),
        pass,
    })
}
