use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use expander_core::constructions::{
    automorphism_group, fixed_vertex_parity_check, kpq_replace, translation_action, vertex_transitive,
    ReplacementPolicy,
};
use expander_core::coverings::{deck_group, quotient_cover_from_reduction, quotient_graph, verify_cover};
use expander_core::family::{
    analyze_family, build_prime_family, build_tower, CheegerMode, FamilySpec, GraphFamily, Thresholds,
};
use expander_core::groups::{
    cayley_graph, cyclic_group, left_translation_action, sl_group, FiniteGroup, GroupAction, GroupSpec,
    ModMatrix, Residue,
};
use expander_core::kernels::{
    ball_roundness_trend, bound_certificate, cnd_sup_exponent, invariance_check, is_negative_kernel,
    kernel_from_metric, quasi_triangle_check, roundness_estimate, Kernel, KernelData, RoundnessConfig, CND_TOL,
};
use expander_core::spectra::{cheeger_exact, cheeger_heuristic, expander_constant, folner_ratio, spectrum, FolnerMode};
use expander_core::{generate, Graph, GraphKind};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::cli::{
    ActionArgs, AnalysisArgs, AutOp, CheegerArg, Command, CoverOp, FamilyOp, FolnerArg, GenKind, Global,
    KernelInput, KernelOp, PolicyArg,
};
use crate::CliError;

/// Result of one command before formatting.
pub struct Outcome {
    pub command: String,
    pub result: Value,
    /// Graph payload for edge-list and DOT output.
    pub graph: Option<Graph>,
    /// Command-specific CSV table.
    pub csv: Option<String>,
}

impl Outcome {
    fn new(command: &str, result: Value) -> Self {
        Outcome {
            command: command.into(),
            result,
            graph: None,
            csv: None,
        }
    }

    fn with_graph(mut self, g: Graph) -> Self {
        self.graph = Some(g);
        self
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn read_text(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_graph(path: &Path) -> Result<Graph, CliError> {
    Ok(Graph::parse_edge_list(&read_text(path)?)?)
}

fn read_vmap(path: &Path) -> Result<Vec<usize>, CliError> {
    read_text(path)?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| CliError::Usage(format!("bad vertex {t:?} in {}", path.display()))))
        .collect()
}

enum AnyGroup {
    Sl(FiniteGroup<ModMatrix>),
    Cyclic(FiniteGroup<Residue>),
}

macro_rules! with_group {
    ($g:expr, $x:ident => $body:expr) => {
        match $g {
            AnyGroup::Sl($x) => $body,
            AnyGroup::Cyclic($x) => $body,
        }
    };
}

fn build_group(spec: &str, gens: Option<&[i64]>, cap: usize) -> Result<AnyGroup, CliError> {
    match spec.parse::<GroupSpec>()? {
        GroupSpec::Sl { dim, modulus } => {
            if gens.is_some() {
                return Err(CliError::Usage("--gens applies to cyclic groups only".into()));
            }
            Ok(AnyGroup::Sl(sl_group(dim, modulus, cap)?))
        }
        GroupSpec::Cyclic { n } => Ok(AnyGroup::Cyclic(cyclic_group(n, gens)?)),
    }
}

#[derive(Deserialize)]
struct ActionFile {
    generators: Vec<Vec<usize>>,
}

fn build_action(g: &Graph, args: &ActionArgs, cap: usize) -> Result<GroupAction, CliError> {
    if let Some(path) = &args.action {
        let file: ActionFile = serde_json::from_str(&read_text(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        return Ok(GroupAction::generated_by(g, &file.generators)?);
    }
    if let Some(spec) = &args.left_translation {
        let group = build_group(spec, args.gens.as_deref(), cap)?;
        return Ok(with_group!(&group, grp => left_translation_action(grp, g))?);
    }
    Err(CliError::Usage("an action is required: --action <file> or --left-translation <group>".into()))
}

fn load_kernel(input: &KernelInput) -> Result<(Kernel, Option<Graph>), CliError> {
    match (&input.kernel, &input.graph) {
        (Some(path), None) => {
            let text = read_text(path)?;
            let k = if path.extension().is_some_and(|e| e == "json") {
                let data: KernelData =
                    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                Kernel::from_data(data)?
            } else {
                Kernel::parse_text(&text)?
            };
            Ok((k, None))
        }
        (None, Some(path)) => {
            let g = read_graph(path)?;
            Ok((kernel_from_metric(&g, input.exponent)?, Some(g)))
        }
        _ => Err(CliError::Usage("give exactly one of --kernel or --graph".into())),
    }
}

fn action_graph(kernel_graph: Option<Graph>, k: &Kernel) -> Graph {
    // a kernel read from a file has no graph; actions are then checked as bare permutations
    kernel_graph.unwrap_or_else(|| Graph::new(k.n(), []).expect("empty graph"))
}

fn thresholds(a: &AnalysisArgs) -> (Thresholds, CheegerMode) {
    let mode = match a.cheeger {
        CheegerArg::Auto => CheegerMode::Auto,
        CheegerArg::Exact => CheegerMode::Exact,
        CheegerArg::Interval => CheegerMode::Interval,
        CheegerArg::Skip => CheegerMode::Skip,
    };
    (Thresholds { eps1: a.eps1, eps2: a.eps2 }, mode)
}

fn family_outcome(name: &str, fam: &GraphFamily, a: &AnalysisArgs) -> Result<Outcome, CliError> {
    let (t, mode) = thresholds(a);
    let report = analyze_family(fam, t, mode)?;
    let mut out = Outcome::new(name, to_value(&report));
    out.csv = Some(report.to_csv());
    Ok(out)
}

fn load_manifest(path: &Path, cap: usize) -> Result<GraphFamily, CliError> {
    let spec: FamilySpec = serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(match spec {
        FamilySpec::Paths { paths } => {
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            let graphs = paths
                .iter()
                .map(|p| {
                    let full: PathBuf = base.join(p);
                    read_graph(&full).map(|g| if g.name().is_some() { g } else { g.with_name(p.clone()) })
                })
                .collect::<Result<Vec<_>, _>>()?;
            GraphFamily::from_graphs(graphs, format!("manifest {}", path.display()))
        }
        FamilySpec::Tower { tower } => build_tower(tower.dim, tower.prime, tower.depth, cap)?,
        FamilySpec::Primes { primes } => build_prime_family(primes.dim, &primes.primes, cap)?,
    })
}

pub fn execute(cmd: &Command, global: &Global) -> Result<Outcome, CliError> {
    let cap = global.cap_order;
    match cmd {
        Command::Gen { kind } => {
            let g = match kind {
                GenKind::Cycle { n } => generate(GraphKind::Cycle(*n))?,
                GenKind::Path { n } => generate(GraphKind::Path(*n))?,
                GenKind::Complete { n } => generate(GraphKind::Complete(*n))?,
                GenKind::Kpq { p, q } => generate(GraphKind::CompleteBipartite(*p, *q))?,
                GenKind::Torus { a, b } => generate(GraphKind::Torus(*a, *b))?,
                GenKind::TreeBall { k, r } => generate(GraphKind::TreeBall { k: *k, r: *r })?,
                GenKind::Petersen => generate(GraphKind::Petersen)?,
                GenKind::Cayley { group, gens } => {
                    let grp = build_group(group, gens.as_deref(), cap)?;
                    let (g, _) = with_group!(&grp, x => cayley_graph(x))?;
                    g.with_name(format!("Cay({group})"))
                }
            };
            let result = json!({
                "name": g.name(),
                "n": g.n(),
                "m": g.edge_count(),
                "edges": g.edges(),
            });
            Ok(Outcome::new("gen", result).with_graph(g))
        }
        Command::Spectrum { graph } => {
            let g = read_graph(graph)?;
            let report = spectrum(&g)?;
            let mut out = Outcome::new("spectrum", to_value(&report));
            let mut csv = String::from("index,eigenvalue\n");
            for (i, v) in report.eigenvalues.iter().enumerate() {
                csv.push_str(&format!("{i},{v}\n"));
            }
            out.csv = Some(csv);
            Ok(out)
        }
        Command::Cheeger { graph, heuristic, .. } => {
            let g = read_graph(graph)?;
            let report = if *heuristic { cheeger_heuristic(&g)? } else { cheeger_exact(&g)? };
            Ok(Outcome::new("cheeger", to_value(&report)))
        }
        Command::ExpanderConstant { graph } => {
            let g = read_graph(graph)?;
            Ok(Outcome::new("expander-constant", to_value(&expander_constant(&g)?)))
        }
        Command::Cover { op } => cover(op, global),
        Command::ReplaceKpq {
            group,
            gens,
            p,
            q,
            policy,
            graph_out,
        } => {
            let policy = match policy {
                PolicyArg::Literal => ReplacementPolicy::Literal,
                PolicyArg::Matched => ReplacementPolicy::Matched,
            };
            let grp = build_group(group, gens.as_deref(), cap)?;
            let (result, translation) = with_group!(&grp, x => {
                let r = kpq_replace(x, *p, *q, policy)?;
                let (t, _) = translation_action(x, &r);
                (r, t)
            });
            if let Some(path) = graph_out {
                fs::write(path, result.graph.to_edge_list())
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            }
            let value = json!({
                "n": result.graph.n(),
                "m": result.graph.edge_count(),
                "replacement": to_value(&result),
                "translation_action": to_value(&translation),
            });
            Ok(Outcome::new("replace-kpq", value).with_graph(result.graph))
        }
        Command::Aut { op } => {
            let (name, value) = match op {
                AutOp::Group { graph } => {
                    let g = read_graph(graph)?;
                    let auts = automorphism_group(&g, global.cap_aut)?;
                    ("aut group", json!({ "order": auts.len(), "automorphisms": auts }))
                }
                AutOp::Transitive { graph } => {
                    let g = read_graph(graph)?;
                    ("aut transitive", to_value(&vertex_transitive(&g, global.cap_aut)?))
                }
                AutOp::Parity { graph, p_class, q_class } => {
                    let g = read_graph(graph)?;
                    let r = fixed_vertex_parity_check(&g, p_class, q_class, global.cap_aut)?;
                    ("aut parity", to_value(&r))
                }
            };
            Ok(Outcome::new(name, value))
        }
        Command::Kernel { op } => kernel(op, global),
        Command::Family { op } => match op {
            FamilyOp::Tower {
                dim,
                prime,
                depth,
                analysis,
            } => family_outcome("family tower", &build_tower(*dim, *prime, *depth, cap)?, analysis),
            FamilyOp::Primes { dim, primes, analysis } => {
                family_outcome("family primes", &build_prime_family(*dim, primes, cap)?, analysis)
            }
            FamilyOp::Manifest { manifest, analysis } => {
                family_outcome("family manifest", &load_manifest(manifest, cap)?, analysis)
            }
        },
        Command::Folner { graph, max_size, mode } => {
            let g = read_graph(graph)?;
            let mode = match mode {
                FolnerArg::Auto => FolnerMode::Auto,
                FolnerArg::Exhaustive => FolnerMode::Exhaustive,
                FolnerArg::Greedy => FolnerMode::Greedy,
            };
            Ok(Outcome::new("folner", to_value(&folner_ratio(&g, *max_size, mode)?)))
        }
    }
}

fn cover(op: &CoverOp, global: &Global) -> Result<Outcome, CliError> {
    match op {
        CoverOp::Verify { source, target, vmap } => {
            let cov = verify_cover(&read_graph(source)?, &read_graph(target)?, &read_vmap(vmap)?);
            Ok(Outcome::new("cover verify", to_value(&cov.summary(None))))
        }
        CoverOp::Deck { source, target, vmap } => {
            let cov = verify_cover(&read_graph(source)?, &read_graph(target)?, &read_vmap(vmap)?);
            let deck = deck_group(&cov)?;
            let value = json!({
                "cover": to_value(&cov.summary(Some(deck.order()))),
                "free": deck.is_free(),
                "closed": deck.is_closed(),
                "automorphisms": deck.automorphisms,
            });
            Ok(Outcome::new("cover deck", value))
        }
        CoverOp::Quotient { graph, action } => {
            let g = read_graph(graph)?;
            let act = build_action(&g, action, global.cap_order)?;
            let q = quotient_graph(&g, &act)?;
            Ok(Outcome::new("cover quotient", to_value(&q.summary())).with_graph(q.graph))
        }
        CoverOp::Reduction { dim, n, m } => {
            let rc = quotient_cover_from_reduction(*dim, *n, *m, global.cap_order)?;
            let deck_order = if rc.cover.verified {
                Some(deck_group(&rc.cover)?.order())
            } else {
                None
            };
            let value = json!({
                "cover": to_value(&rc.cover.summary(deck_order)),
                "kernel_size": rc.kernel.len(),
                "degeneracy": to_value(&rc.degeneracy),
            });
            Ok(Outcome::new("cover reduction", value))
        }
    }
}

fn kernel(op: &KernelOp, global: &Global) -> Result<Outcome, CliError> {
    let roundness_cfg = |n_max: usize, tol_q: f64| RoundnessConfig {
        n_max,
        tol_q,
        samples: global.cap_samples,
        seed: global.seed,
        exhaustive_limit: global.cap_exhaustive,
    };
    match op {
        KernelOp::Cnd { input } => {
            let (k, _) = load_kernel(input)?;
            Ok(Outcome::new("kernel cnd", to_value(&is_negative_kernel(&k, CND_TOL))))
        }
        KernelOp::QuasiTriangle { input } => {
            let (k, _) = load_kernel(input)?;
            Ok(Outcome::new("kernel quasi-triangle", to_value(&quasi_triangle_check(&k))))
        }
        KernelOp::Invariance { input, action } => {
            let (k, g) = load_kernel(input)?;
            let act = build_action(&action_graph(g, &k), action, global.cap_order)?;
            let r = invariance_check(&k, &act, global.tol, 1_000_000, global.seed)?;
            Ok(Outcome::new("kernel invariance", to_value(&r)))
        }
        KernelOp::BoundCert { input, action } => {
            let (k, g) = load_kernel(input)?;
            let act = build_action(&action_graph(g, &k), action, global.cap_order)?;
            Ok(Outcome::new("kernel bound-cert", to_value(&bound_certificate(&k, &act, global.tol)?)))
        }
        KernelOp::SupExponent { graph, tol_p } => {
            let g = read_graph(graph)?;
            Ok(Outcome::new("kernel sup-exponent", to_value(&cnd_sup_exponent(&g, *tol_p)?)))
        }
        KernelOp::Roundness {
            graph,
            n_max,
            tol_q,
            center,
            radii,
        } => {
            let g = read_graph(graph)?;
            let cfg = roundness_cfg(*n_max, *tol_q);
            let value = match center {
                Some(c) => {
                    let radii = radii.clone().unwrap_or_else(|| vec![1, 2, 3]);
                    let trend = ball_roundness_trend(&g, *c, &radii, &cfg)?;
                    let uppers: Vec<Option<f64>> = trend.iter().map(|b| b.estimate.q_upper).collect();
                    let non_increasing = uppers
                        .windows(2)
                        .all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if b <= a) || w[0].is_none());
                    json!({ "balls": to_value(&trend), "q_upper_non_increasing": non_increasing })
                }
                None => to_value(&roundness_estimate(&g, &cfg)?),
            };
            Ok(Outcome::new("kernel roundness", value))
        }
    }
}
