use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};
use treelaw::locus::{
    dim_bounds_report, eo_constraint_residual, eo_gradient_check, lie_shuffle_vector,
    trybula_contains, CyclePermutation, EventPair,
};
use treelaw::mst_exact::{mst_distribution_with, mst_prob, ust_distribution, Method};
use treelaw::rational::{fmt_q, int, parse_q, rat, to_f64, Rational};
use treelaw::rotations::{
    cycle_expanding_check, find_cycle_expanding_bijection, path_rotation_probs, Expansion,
    PathRotationInstance,
};
use treelaw::sampler::{sample_mst_empirical, slide_monotonicity_test, SamplerConfig};
use treelaw::shift_exact::{
    is_snowman_free, shiftahedron_sum, solve_theta_ust_shift, theta_report,
    tree_distribution_exact, ProductMeasureSpec,
};
use treelaw::word_maps::{
    draw_matrix, draw_matrix_rank, ordering_name, orderings, parse_word, shorten_word_map,
    uniform_word_quadrature, uniform_word_recursive, universal_word, word_distribution,
    word_string, WordMap,
};
use treelaw::{Error, Graph, Limits, TreeDistribution};

#[derive(Parser)]
#[command(
    name = "treelaw",
    version,
    about = "Exact and sampled laws of random spanning trees and orderings"
)]
struct Cli {
    /// Cap on enumerated orders and folded permutations.
    #[arg(long, global = true, env = "TREELAW_MAX_PERMS")]
    max_perms: Option<u128>,
    /// Cap on materialised spanning trees.
    #[arg(long, global = true, env = "TREELAW_MAX_TREES")]
    max_trees: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum UniformMethod {
    Recursive,
    Quadrature,
}

#[derive(Clone, Copy, ValueEnum)]
enum Figure {
    Trybula,
    Shiftahedron3,
}

#[derive(clap::Args)]
struct WordInput {
    /// Word map as JSON, inline or a file path.
    #[arg(long, conflicts_with = "word")]
    word_map: Option<String>,
    /// Word over a, b, c, ...
    #[arg(long)]
    word: Option<String>,
    /// Per-position weights for --word, e.g. "[2,1,1/2]".
    #[arg(long, requires = "word")]
    weights: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Probability that a given spanning tree is the minimum spanning tree.
    MstProb {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        tree: String,
        #[arg(long, default_value = "internal")]
        method: String,
    },
    /// Exact law of the minimum spanning tree under i.i.d. weights.
    MstDist {
        #[arg(long)]
        graph: String,
    },
    /// Uniform spanning tree law.
    Ust {
        #[arg(long)]
        graph: String,
    },
    /// Exact P(T) and P(T') for a path rotation in K_n.
    PathRotate {
        #[arg(long)]
        n: usize,
        #[arg(long = "L")]
        left: String,
        #[arg(long)]
        path: String,
        #[arg(long = "R")]
        right: String,
    },
    /// Checks or searches for a cycle-expanding bijection between two trees.
    RotateCheck {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        t1: String,
        #[arg(long)]
        t2: String,
        #[arg(long)]
        beta: Option<String>,
    },
    /// Exact tree law under shifted unit intervals or a product measure.
    ShiftDist {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        shifts: Option<String>,
        #[arg(long, conflicts_with = "shifts")]
        measure: Option<String>,
    },
    /// Theta-graph formulas, optionally shifted or solved for a uniform law.
    Theta {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, conflicts_with = "solve_ust")]
        shifts: Option<String>,
        #[arg(long)]
        solve_ust: bool,
    },
    /// Whether the graph is snowman-free.
    Snowman {
        #[arg(long)]
        graph: String,
    },
    /// Law on orderings induced by a word map.
    WordDist {
        #[command(flatten)]
        input: WordInput,
    },
    /// Draw matrix of a word and its rank.
    DrawMatrix {
        #[arg(long)]
        word: String,
    },
    /// Shortens a word map without changing its law.
    Shorten {
        #[command(flatten)]
        input: WordInput,
    },
    /// A word map inducing the uniform law on orderings.
    UniformWord {
        #[arg(long, value_enum)]
        method: UniformMethod,
        #[arg(long)]
        m: usize,
    },
    /// The universal word on m symbols.
    UniversalWord {
        #[arg(long)]
        m: usize,
    },
    /// Upper and lower bounds on the dimension of the product-measure locus.
    DimBound {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        word: Option<String>,
    },
    /// Membership of (P(X1<X2), P(X2<X3), P(X3<X1)) in the three-variable region.
    Trybula {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Shuffle product of the cycle brackets of a permutation.
    LieVector {
        #[arg(long)]
        perm: String,
    },
    /// Gradient check of the even/odd constraint; with a word map, also its residual.
    EoCheck {
        #[arg(long)]
        perm: String,
        #[command(flatten)]
        input: WordInput,
    },
    /// Monte Carlo tree counts.
    Sample {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        measure: Option<String>,
        #[arg(long, conflicts_with = "measure")]
        shifts: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        streams: usize,
    },
    /// Edge-inclusion estimates while one edge's interval slides.
    SlideTest {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        shifts: Option<String>,
        #[arg(long, default_value_t = 0)]
        edge: usize,
        #[arg(long, default_value = "[0,1/4,1/2,3/4,1]")]
        grid: String,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// CSV point clouds for external plotting.
    EmitPlotData {
        #[arg(long, value_enum)]
        figure: Figure,
        /// Grid steps per axis for the region scan.
        #[arg(long, default_value_t = 20)]
        steps: u32,
    },
}

type Res<T> = treelaw::Result<T>;

/// A JSON payload with an optional dedicated CSV rendering.
struct Report {
    json: Value,
    csv: Option<String>,
}

impl From<Value> for Report {
    fn from(json: Value) -> Self {
        Report { json, csv: None }
    }
}

fn load_json<T: DeserializeOwned>(arg: &str, what: &str) -> Res<T> {
    let text = match arg.trim_start().chars().next() {
        Some('{') | Some('[') => arg.to_string(),
        _ => std::fs::read_to_string(arg)
            .map_err(|e| Error::input(format!("cannot read {what} file {arg:?}: {e}")))?,
    };
    serde_json::from_str(&text).map_err(|e| Error::input(format!("bad {what}: {e}")))
}

fn parse_list<T: DeserializeOwned>(arg: &str, what: &str) -> Res<T> {
    serde_json::from_str(arg).map_err(|e| Error::input(format!("bad {what} {arg:?}: {e}")))
}

/// `[a, b, ...]` with entries as integers, decimals or `p/q`, quoted or not.
fn parse_q_list(arg: &str) -> Res<Vec<Rational>> {
    let inner = arg
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::input(format!("expected a bracketed list, got {arg:?}")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|x| parse_q(x.trim().trim_matches('"')))
        .collect()
}

fn q(x: &Rational) -> Value {
    Value::String(fmt_q(x))
}

fn tree_key(t: &[usize]) -> String {
    serde_json::to_string(t).expect("serializable")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn two_columns(header: (&str, &str), rows: impl IntoIterator<Item = (String, String)>) -> String {
    let mut out = format!("{},{}\n", header.0, header.1);
    for (a, b) in rows {
        let _ = writeln!(out, "{},{}", csv_field(&a), csv_field(&b));
    }
    out
}

fn dist_report(d: &TreeDistribution) -> Report {
    let map: Map<String, Value> = d.probs.iter().map(|(t, p)| (tree_key(t), q(p))).collect();
    let csv = two_columns(
        ("tree", "prob"),
        d.probs.iter().map(|(t, p)| (tree_key(t), fmt_q(p))),
    );
    Report {
        json: Value::Object(map),
        csv: Some(csv),
    }
}

/// Flat rendering for payloads without a dedicated table.
fn generic_csv(v: &Value) -> String {
    let cell = |v: &Value| match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    match v {
        Value::Object(m) => two_columns(
            ("key", "value"),
            m.iter().map(|(k, v)| (k.clone(), cell(v))),
        ),
        other => format!("{}\n", csv_field(&cell(other))),
    }
}

fn word_map_of(input: &WordInput) -> Res<WordMap> {
    match (&input.word_map, &input.word) {
        (Some(wm), None) => load_json(wm, "word map"),
        (None, Some(w)) => match &input.weights {
            Some(ws) => WordMap::new(parse_word(w)?, parse_q_list(ws)?),
            None => WordMap::unit(parse_word(w)?),
        },
        _ => Err(Error::input("give either --word-map or --word")),
    }
}

fn word_map_json(wm: &WordMap) -> Value {
    serde_json::to_value(wm).expect("serializable")
}

fn order_report(d: &BTreeMap<Vec<usize>, Rational>) -> Report {
    let map: Map<String, Value> = d.iter().map(|(o, p)| (ordering_name(o), q(p))).collect();
    let csv = two_columns(
        ("ordering", "prob"),
        d.iter().map(|(o, p)| (ordering_name(o), fmt_q(p))),
    );
    Report {
        json: Value::Object(map),
        csv: Some(csv),
    }
}

fn measure_of(
    graph: &Graph,
    measure: &Option<String>,
    shifts: &Option<String>,
) -> Res<ProductMeasureSpec> {
    let spec = match (measure, shifts) {
        (Some(m), _) => load_json::<ProductMeasureSpec>(m, "measure")?,
        (None, Some(s)) => ProductMeasureSpec::from_shifts(&parse_q_list(s)?),
        (None, None) => ProductMeasureSpec::iid_uniform(graph.m()),
    };
    if spec.m() != graph.m() {
        return Err(Error::input(format!(
            "measure has {} edges, graph has {}",
            spec.m(),
            graph.m()
        )));
    }
    Ok(spec)
}

fn trybula_csv(steps: u32) -> Res<String> {
    let mut out = String::from("x,y,z\n");
    for i in 0..=steps {
        for j in 0..=steps {
            for k in 0..=steps {
                let s = steps as i64;
                let (x, y, z) = (rat(i as i64, s), rat(j as i64, s), rat(k as i64, s));
                if trybula_contains(&x, &y, &z)? {
                    let _ = writeln!(out, "{},{},{}", to_f64(&x), to_f64(&y), to_f64(&z));
                }
            }
        }
    }
    Ok(out)
}

/// Boundary vertices of the three-dimensional shiftahedron in angular order, with planar
/// coordinates in the plane of constant sum.
fn shiftahedron3_csv() -> String {
    let sum = shiftahedron_sum(3);
    let mut pts: Vec<Vec<Rational>> = Vec::new();
    for (g1, g2) in [(0, 1), (1, 0), (1, 1)] {
        let (g1, g2) = (int(g1), int(g2));
        let a = (&sum - int(2) * &g1 - &g2) / int(3);
        let sorted = [a.clone(), &a + &g1, &a + &g1 + &g2];
        for p in orderings(3) {
            let v: Vec<Rational> = p.iter().map(|&i| sorted[i].clone()).collect();
            if !pts.contains(&v) {
                pts.push(v);
            }
        }
    }
    let planar = |v: &[Rational]| {
        let f: Vec<f64> = v.iter().map(to_f64).collect();
        (
            (f[0] - f[1]) / 2f64.sqrt(),
            (f[0] + f[1] - 2.0 * f[2]) / 6f64.sqrt(),
        )
    };
    pts.sort_by(|a, b| {
        let (pa, pb) = (planar(a), planar(b));
        pa.1.atan2(pa.0).total_cmp(&pb.1.atan2(pb.0))
    });
    let mut out = String::from("s1,s2,s3,u,v\n");
    for p in &pts {
        let (u, v) = planar(p);
        let _ = writeln!(
            out,
            "{},{},{},{u},{v}",
            fmt_q(&p[0]),
            fmt_q(&p[1]),
            fmt_q(&p[2])
        );
    }
    out
}

fn run(cmd: &Cmd, limits: &Limits) -> Res<Report> {
    Ok(match cmd {
        Cmd::MstProb {
            graph,
            tree,
            method,
        } => {
            let g: Graph = load_json(graph, "graph")?;
            let t: Vec<usize> = parse_list(tree, "tree")?;
            let p = mst_prob(&g, &t, method.parse::<Method>()?, limits)?;
            json!({ "prob": fmt_q(&p) }).into()
        }
        Cmd::MstDist { graph } => {
            dist_report(&mst_distribution_with(&load_json(graph, "graph")?, limits)?)
        }
        Cmd::Ust { graph } => dist_report(&ust_distribution(&load_json(graph, "graph")?, limits)?),
        Cmd::PathRotate {
            n,
            left,
            path,
            right,
        } => {
            let inst = PathRotationInstance::new(
                *n,
                parse_list(left, "L")?,
                parse_list(path, "path")?,
                parse_list(right, "R")?,
            )?;
            let (p, pp) = path_rotation_probs(&inst, limits)?;
            json!({ "pT": fmt_q(&p), "pTprime": fmt_q(&pp) }).into()
        }
        Cmd::RotateCheck {
            graph,
            t1,
            t2,
            beta,
        } => {
            let g: Graph = load_json(graph, "graph")?;
            let t1 = g.check_spanning_tree(&parse_list::<Vec<usize>>(t1, "tree")?)?;
            let t2 = g.check_spanning_tree(&parse_list::<Vec<usize>>(t2, "tree")?)?;
            let beta = match beta {
                Some(b) => Some(parse_list::<Vec<usize>>(b, "bijection")?),
                None => find_cycle_expanding_bijection(&g, &t1, &t2, limits)?,
            };
            let expansion = match &beta {
                None => "none found",
                Some(b) => match cycle_expanding_check(&g, &t1, &t2, b)? {
                    Expansion::Strict => "strict",
                    Expansion::Weak => "weak",
                    Expansion::NotExpanding => "not expanding",
                },
            };
            let p1 = mst_prob(&g, &t1, Method::Internal, limits)?;
            let p2 = mst_prob(&g, &t2, Method::Internal, limits)?;
            json!({ "expansion": expansion, "beta": beta, "pT1": fmt_q(&p1), "pT2": fmt_q(&p2) })
                .into()
        }
        Cmd::ShiftDist {
            graph,
            shifts,
            measure,
        } => {
            let g: Graph = load_json(graph, "graph")?;
            let spec = measure_of(&g, measure, shifts)?;
            dist_report(&tree_distribution_exact(&g, &spec, limits)?)
        }
        Cmd::Theta {
            r,
            s,
            t,
            shifts,
            solve_ust,
        } => {
            let l = [*r, *s, *t];
            let shifts = match shifts {
                Some(sh) => {
                    let v = parse_q_list(sh)?;
                    let arr: [Rational; 3] = v
                        .try_into()
                        .map_err(|_| Error::input("theta needs three shifts"))?;
                    Some(arr)
                }
                None => None,
            };
            let rep = theta_report(l, shifts, limits)?;
            let qs = |a: &[Rational; 3]| a.iter().map(q).collect::<Vec<_>>();
            let mut out = json!({
                "lengths": l,
                "tree_count": rep.tree_count,
                "mst0_type": qs(&rep.mst0_type),
                "mst0_tree": qs(&rep.mst0_tree),
                "ust_type": qs(&rep.ust_type),
                "ust_tree": q(&rep.ust_tree),
                "gap_type": qs(&rep.gap_type),
                "gap_tree": qs(&rep.gap_tree),
            });
            if let Some(sh) = &rep.shifted {
                out["shifted"] = json!({
                    "shifts": qs(&sh.shifts),
                    "type_probs": qs(&sh.type_probs),
                    "tv_to_ust": q(&sh.tv_to_ust),
                });
            }
            if *solve_ust {
                let sol = solve_theta_ust_shift(l)?;
                let mut approx = json!({
                    "shifts": sol.shifts.iter().map(to_f64).collect::<Vec<_>>(),
                    "tv_to_ust": to_f64(&sol.tv_to_ust),
                });
                if l == [2, 1, 2] {
                    let e = to_f64(&sol.shifts[1]);
                    approx["quintic_residual"] =
                        json!(6.0 * e.powi(5) - 20.0 * e.powi(3) + 30.0 * e - 1.0);
                }
                out["solution"] = json!({
                    "shifts": qs(&sol.shifts),
                    "type_probs": qs(&sol.type_probs),
                    "tv_to_ust": q(&sol.tv_to_ust),
                    "approx": approx,
                });
            }
            out.into()
        }
        Cmd::Snowman { graph } => {
            json!({ "snowman_free": is_snowman_free(&load_json(graph, "graph")?)? }).into()
        }
        Cmd::WordDist { input } => order_report(&word_distribution(&word_map_of(input)?)?),
        Cmd::DrawMatrix { word } => {
            let w = parse_word(word)?;
            let m = w.iter().max().map_or(0, |&x| x + 1);
            let d = draw_matrix(&w)?;
            let cols: Vec<String> = orderings(m).iter().map(|o| ordering_name(o)).collect();
            let mut csv = format!("position,{}\n", cols.join(","));
            for (i, row) in d.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(u128::to_string).collect();
                let _ = writeln!(csv, "{},{}", i + 1, cells.join(","));
            }
            let matrix: Vec<Vec<Value>> = d
                .iter()
                .map(|r| r.iter().map(|&x| json!(x as u64)).collect())
                .collect();
            let json = json!({
                "word": word_string(&w),
                "columns": cols,
                "matrix": matrix,
                "rank": draw_matrix_rank(&w)?,
            });
            Report {
                json,
                csv: Some(csv),
            }
        }
        Cmd::Shorten { input } => word_map_json(&shorten_word_map(&word_map_of(input)?)?).into(),
        Cmd::UniformWord { method, m } => {
            let wm = match method {
                UniformMethod::Recursive => uniform_word_recursive(*m)?,
                UniformMethod::Quadrature => uniform_word_quadrature(*m)?,
            };
            word_map_json(&wm).into()
        }
        Cmd::UniversalWord { m } => word_map_json(&WordMap::unit(universal_word(*m)?)?).into(),
        Cmd::DimBound { m, word } => {
            let w = word.as_deref().map(parse_word).transpose()?;
            serde_json::to_value(dim_bounds_report(*m, w)?)
                .expect("serializable")
                .into()
        }
        Cmd::Trybula { x, y, z } => {
            json!({ "inside": trybula_contains(&parse_q(x)?, &parse_q(y)?, &parse_q(z)?)? }).into()
        }
        Cmd::LieVector { perm } => {
            let pi = CyclePermutation::parse(perm, None)?;
            let v = lie_shuffle_vector(&pi)?;
            let one_based = |o: &[usize]| o.iter().map(|x| (x + 1).to_string()).collect::<String>();
            let terms: Map<String, Value> =
                v.terms.iter().map(|(o, c)| (one_based(o), q(c))).collect();
            let csv = two_columns(
                ("ordering", "coeff"),
                v.terms.iter().map(|(o, c)| (one_based(o), fmt_q(c))),
            );
            let json =
                json!({ "permutation": pi.to_string(), "vector": v.to_string(), "terms": terms });
            Report {
                json,
                csv: Some(csv),
            }
        }
        Cmd::EoCheck { perm, input } => {
            let pi = CyclePermutation::parse(perm, None)?;
            let mut out = serde_json::to_value(eo_gradient_check(&pi)?).expect("serializable");
            if input.word.is_some() || input.word_map.is_some() {
                let wm = word_map_of(input)?;
                if wm.m != pi.m {
                    return Err(Error::input(format!(
                        "word map has {} symbols, permutation {}",
                        wm.m, pi.m
                    )));
                }
                let events = pi
                    .nontrivial()
                    .into_iter()
                    .map(|c| EventPair::from_cycle(pi.m, c))
                    .collect::<Res<Vec<_>>>()?;
                let res = eo_constraint_residual(&word_distribution(&wm)?, &events)?;
                out["residual"] = q(&res);
            }
            out.into()
        }
        Cmd::Sample {
            graph,
            measure,
            shifts,
            n,
            seed,
            streams,
        } => {
            let g: Graph = load_json(graph, "graph")?;
            let spec = measure_of(&g, measure, shifts)?;
            let cfg = SamplerConfig {
                seed: *seed,
                samples: *n,
                streams: *streams,
            };
            let emp = sample_mst_empirical(&g, &spec, &cfg)?;
            let counts: Map<String, Value> = emp
                .counts
                .iter()
                .map(|(t, c)| (tree_key(t), json!(c)))
                .collect();
            let freqs: Map<String, Value> = emp
                .frequencies()
                .iter()
                .map(|(t, f)| (tree_key(t), json!(f)))
                .collect();
            let csv = two_columns(
                ("tree", "count"),
                emp.counts.iter().map(|(t, c)| (tree_key(t), c.to_string())),
            );
            let json = json!({
                "seed": seed,
                "samples": n,
                "streams": streams,
                "counts": counts,
                "approx": { "frequencies": freqs },
            });
            Report {
                json,
                csv: Some(csv),
            }
        }
        Cmd::SlideTest {
            graph,
            shifts,
            edge,
            grid,
            n,
            seed,
        } => {
            let g: Graph = load_json(graph, "graph")?;
            let s = match shifts {
                Some(s) => parse_q_list(s)?,
                None => vec![int(0); g.m()],
            };
            let rep = slide_monotonicity_test(
                &g,
                &s,
                *edge,
                &parse_q_list(grid)?,
                &SamplerConfig::new(*seed, *n),
            )?;
            let mut out = json!({ "result": if rep.pass { "PASS" } else { "FAIL" } });
            out["approx"] = serde_json::to_value(&rep).expect("serializable");
            out.into()
        }
        Cmd::EmitPlotData { figure, steps } => {
            let csv = match figure {
                Figure::Trybula => trybula_csv((*steps).max(1))?,
                Figure::Shiftahedron3 => shiftahedron3_csv(),
            };
            Report {
                json: Value::String(csv.clone()),
                csv: Some(csv),
            }
        }
    })
}

fn limits_of(cli: &Cli) -> Limits {
    let mut l = Limits::default();
    if let Some(p) = cli.max_perms {
        l.max_internal_terms = p;
        l.max_external_terms = p;
        l.max_brute_perms = p;
        l.max_folded = p;
    }
    if let Some(t) = cli.max_trees {
        l.max_trees = t;
    }
    l
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Input(_) => 1,
        Error::Cap { .. } => 2,
        Error::Internal(_) => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: cannot set up {t} threads: {e}");
            return ExitCode::from(3);
        }
    }
    let limits = limits_of(&cli);
    match run(&cli.cmd, &limits) {
        Ok(rep) => {
            let text = match (cli.output, &cli.cmd) {
                (_, Cmd::EmitPlotData { .. }) | (Output::Csv, _) => {
                    rep.csv.unwrap_or_else(|| generic_csv(&rep.json))
                }
                (Output::Json, _) => {
                    let mut s = serde_json::to_string_pretty(&rep.json).expect("serializable");
                    s.push('\n');
                    s
                }
            };
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
