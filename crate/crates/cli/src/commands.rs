//! Verb implementations. Each returns an [`Outcome`]: the verdict, a JSON
//! report and a one-line human summary.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;

use bisimkit_core::dot::{explicit_tree_dot, lts_dot, multitree_dot, nlmp_dot};
use bisimkit_core::e0::{b_bisim_report, b_tree_rank, build_b, eval_symbolic};
use bisimkit_core::expansion::{omega_code_expand, omega_expand, omega_expand_truncated};
use bisimkit_core::io::{
    self, nlmp_to_json, parse_carrier, parse_code, parse_epset, parse_formula, parse_lts,
    parse_multitree, parse_nlmp, parse_tree, parse_uniform, rel_to_json, IoError, TreeInput,
};
use bisimkit_core::lts::{code_to_lts, eval_formula, greatest_bisim, state_rank};
use bisimkit_core::nlmp::{greatest_ext_bisim, greatest_state_bisim, NlmpError};
use bisimkit_core::substructure::{reach_a_s, substructure, sum_nlmp};
use bisimkit_core::treeiso::{canon, iso};
use bisimkit_core::trees::{sym_rank, sym_truncate, Ranked};
use bisimkit_core::uniform::{f_process, uniform_bisim_search, validate_uniform, x_enum, UniformError};
use bisimkit_core::verify::{self, Selection};
use bisimkit_core::{ExplicitTree, MultiTree, OrdinalCnf, PointedLts, PointmassNlmp};

use crate::{Cli, Command, E0Action, Format, Kind};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error(transparent)]
    Parse(#[from] IoError),
    #[error("{0}")]
    Input(String),
}

fn input(msg: impl ToString) -> CliError {
    CliError::Input(msg.to_string())
}

pub struct Outcome {
    pub holds: bool,
    pub report: Value,
    pub summary: String,
    /// Printed verbatim instead of the report (DOT output).
    pub raw: Option<String>,
}

impl Outcome {
    fn new(holds: bool, report: Value, summary: impl Into<String>) -> Self {
        Self { holds, report, summary: summary.into(), raw: None }
    }

    pub fn render(&self, format: Format) -> String {
        if let Some(raw) = &self.raw {
            return raw.clone();
        }
        match format {
            Format::Json => {
                let mut report = self.report.clone();
                if let Value::Object(map) = &mut report {
                    map.insert("holds".into(), self.holds.into());
                    map.insert("summary".into(), self.summary.clone().into());
                }
                format!("{}\n", serde_json::to_string_pretty(&report).expect("plain JSON"))
            }
            Format::Text => format!("{}\n", self.summary),
        }
    }
}

struct Loaded {
    name: String,
    text: String,
}

fn load(path: &Path) -> Result<Loaded, CliError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: name.clone(), source })?;
    Ok(Loaded { name, text })
}

/// Guesses the file kind from its top-level fields.
fn detect(file: &Loaded) -> Result<Kind, CliError> {
    let value: Value = io::from_json(&file.name, &file.text)?;
    let obj = value.as_object().ok_or_else(|| input(format!("{}: expected a JSON object", file.name)))?;
    Ok(if obj.contains_key("kind") {
        Kind::Tree
    } else if obj.contains_key("trans") {
        Kind::Nlmp
    } else if obj.contains_key("states") {
        Kind::Lts
    } else if obj.contains_key("root") && obj.contains_key("edges") {
        Kind::Code
    } else {
        Kind::Multitree
    })
}

fn lts_state(lts: &PointedLts, name: Option<&str>) -> Result<usize, CliError> {
    match name {
        None => Ok(lts.root()),
        Some(n) => lts.state_index(n).map_err(input),
    }
}

fn nlmp_state(n: &PointmassNlmp, name: &str) -> Result<usize, CliError> {
    n.state_index(name).ok_or_else(|| input(format!("no state named {name:?}")))
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let witness = cli.witness;
    match &cli.command {
        Command::Bisim { left, right, left_state, right_state } => {
            let (lf, rf) = (load(left)?, load(right)?);
            let (l, r) = (parse_lts(&lf.name, &lf.text)?, parse_lts(&rf.name, &rf.text)?);
            let (s, t) = (lts_state(&l, left_state.as_deref())?, lts_state(&r, right_state.as_deref())?);
            let g = greatest_bisim(&l, &r);
            let holds = g.contains(s, t);
            let (sn, tn) = (&l.states()[s], &r.states()[t]);
            let mut report = json!({ "verb": "bisim", "left_state": sn, "right_state": tn, "bisimilar": holds });
            if witness {
                report["relation"] = rel_to_json(&g, l.states(), r.states());
            }
            let rel = if holds { "~" } else { "!~" };
            Ok(Outcome::new(holds, report, format!("{sn} {rel} {tn}")))
        }
        Command::NlmpBisim { left, right, left_state, right_state, uniform, bound } => {
            nlmp_bisim(left, right.as_deref(), left_state.as_deref(), right_state.as_deref(), uniform.as_deref(), *bound, witness)
        }
        Command::Rank { input: path, state, kind } => rank(path, state.as_deref(), *kind),
        Command::Expand { input: path, state, depth, bound, kind } => expand(path, state.as_deref(), *depth, *bound, *kind, witness),
        Command::Iso { left, right } => {
            let (t, u) = (load_multitree(left)?, load_multitree(right)?);
            let holds = iso(&t, &u);
            let mut report = json!({ "verb": "iso", "isomorphic": holds });
            if witness {
                report["left_canonical"] = canon(&t).as_str().into();
                report["right_canonical"] = canon(&u).as_str().into();
            }
            Ok(Outcome::new(holds, report, if holds { "isomorphic" } else { "not isomorphic" }))
        }
        Command::E0 { action } => e0(action, witness),
        Command::Substructure { nlmp, carrier, state, sum } => substructure_verb(nlmp, carrier.as_deref(), state.as_deref(), sum.as_deref()),
        Command::Eval { input: path, formula, state, kind } => eval(path, formula, state.as_deref(), *kind),
        Command::Verify { suite, seed } => {
            let selection: Selection = suite.parse().map_err(input)?;
            let report = verify::run(&selection, *seed);
            let summary = verify::summary(&report);
            let value = serde_json::to_value(&report).expect("plain data");
            Ok(Outcome::new(report.passed, value, summary.trim_end()))
        }
        Command::ExportDot { input: path, kind, depth, width } => export_dot(path, *kind, *depth, *width),
    }
}

fn nlmp_bisim(
    left: &Path,
    right: Option<&Path>,
    left_state: Option<&str>,
    right_state: Option<&str>,
    uniform: Option<&Path>,
    bound: Option<usize>,
    witness: bool,
) -> Result<Outcome, CliError> {
    let lf = load(left)?;
    let n = parse_nlmp(&lf.name, &lf.text)?;
    let m = match right {
        Some(p) => {
            let rf = load(p)?;
            Some(parse_nlmp(&rf.name, &rf.text)?)
        }
        None => None,
    };
    let other = m.as_ref().unwrap_or(&n);
    let (Some(ls), Some(rs)) = (left_state, right_state) else {
        // No pair given: report the greatest relation.
        let g = match &m {
            Some(m) => greatest_ext_bisim(&n, m),
            None => greatest_state_bisim(&n),
        };
        let report = json!({ "verb": "nlmp-bisim", "relation": rel_to_json(&g, n.states(), other.states()) });
        return Ok(Outcome::new(true, report, format!("{} related pairs", g.len())));
    };
    let (s, t) = (nlmp_state(&n, ls)?, nlmp_state(other, rs)?);
    let mut report = json!({ "verb": "nlmp-bisim", "left_state": ls, "right_state": rs });
    let holds = if let Some(upath) = uniform {
        if m.is_some() {
            return Err(input("--uniform applies to a single process"));
        }
        let uf = load(upath)?;
        let u = parse_uniform(&uf.name, &uf.text, &n)?;
        validate_uniform(&n, &u).map_err(|e: UniformError| input(format!("{}: {e}", uf.name)))?;
        if let Some(b) = bound {
            for x in [s, t] {
                if x_enum(&u, x, b + 1).len() > b {
                    return Err(input(format!("X_{} has more than {b} states", n.states()[x])));
                }
            }
        }
        let found = uniform_bisim_search(&n, &u, s, t).map_err(input)?;
        if witness {
            report["relation"] = rel_to_json(&found.witness, n.states(), n.states());
            report["z_closed"] = found.z_closed.into();
        }
        found.bisimilar
    } else {
        let g = match &m {
            Some(m) => greatest_ext_bisim(&n, m),
            None => greatest_state_bisim(&n),
        };
        if witness {
            report["relation"] = rel_to_json(&g, n.states(), other.states());
        }
        g.contains(s, t)
    };
    report["bisimilar"] = holds.into();
    let rel = if holds { "~" } else { "!~" };
    Ok(Outcome::new(holds, report, format!("{ls} {rel} {rs}")))
}

fn ordinal_json(o: &OrdinalCnf) -> Value {
    json!({ "cnf": o, "display": o.to_string() })
}

fn rank(path: &Path, state: Option<&str>, kind: Option<Kind>) -> Result<Outcome, CliError> {
    let file = load(path)?;
    let kind = match kind {
        Some(k) => k,
        None => detect(&file)?,
    };
    let tree_report = |root: OrdinalCnf, tree: OrdinalCnf| {
        let summary = format!("root rank {root}, tree rank {tree}");
        Outcome::new(true, json!({ "verb": "rank", "root_rank": ordinal_json(&root), "tree_rank": ordinal_json(&tree) }), summary)
    };
    match kind {
        Kind::Lts | Kind::Code => {
            let lts = if kind == Kind::Lts {
                parse_lts(&file.name, &file.text)?
            } else {
                code_to_lts(&parse_code(&file.name, &file.text)?, 10_000).map_err(input)?
            };
            let s = lts_state(&lts, state)?;
            let r = state_rank(&lts, s);
            let name = &lts.states()[s];
            let report = json!({ "verb": "rank", "state": name, "rank": r, "display": r.to_string() });
            Ok(Outcome::new(true, report, format!("rank({name}) = {r}")))
        }
        Kind::Tree => Ok(match parse_tree(&file.name, &file.text)? {
            TreeInput::Explicit(t) if t.is_empty() => tree_report(OrdinalCnf::zero(), OrdinalCnf::zero()),
            TreeInput::Explicit(t) => {
                let root = OrdinalCnf::from_nat(t.node_rank(&[]));
                tree_report(root.clone(), root.succ())
            }
            TreeInput::Symbolic(t) => {
                let (root, tree) = sym_rank(&t);
                tree_report(root, tree)
            }
        }),
        Kind::Multitree => {
            let t = parse_multitree(&file.name, &file.text)?;
            Ok(tree_report(t.root_rank(), t.tree_rank()))
        }
        Kind::Nlmp => Err(input("rank is defined for LTS and trees")),
    }
}

fn expand(path: &Path, state: Option<&str>, depth: Option<usize>, bound: usize, kind: Option<Kind>, witness: bool) -> Result<Outcome, CliError> {
    let file = load(path)?;
    let kind = match kind {
        Some(k) => k,
        None => detect(&file)?,
    };
    let tree = match kind {
        Kind::Lts => {
            let lts = parse_lts(&file.name, &file.text)?;
            let s = lts_state(&lts, state)?;
            match depth {
                Some(d) => omega_expand_truncated(&lts, s, d),
                None => omega_expand(&lts, s).map_err(input)?,
            }
        }
        Kind::Code => {
            let code = parse_code(&file.name, &file.text)?;
            match depth {
                Some(d) => {
                    let lts = code_to_lts(&code, bound).map_err(input)?;
                    omega_expand_truncated(&lts, lts.root(), d)
                }
                None => omega_code_expand(&code, bound).map_err(input)?,
            }
        }
        _ => return Err(input("expand takes an LTS or an omega-LTS code")),
    };
    let form = canon(&tree);
    let mut report = json!({ "verb": "expand", "canonical": form.as_str(), "root_rank": ordinal_json(&tree.root_rank()) });
    if witness {
        report["tree"] = serde_json::to_value(&tree).expect("plain data");
    }
    Ok(Outcome::new(true, report, form.as_str().to_string()))
}

fn load_multitree(path: &Path) -> Result<MultiTree, CliError> {
    let file = load(path)?;
    match detect(&file)? {
        Kind::Tree => match parse_tree(&file.name, &file.text)? {
            TreeInput::Explicit(t) => Ok(MultiTree::from_explicit(&t, bisimkit_core::lts::TREE_LABEL)),
            TreeInput::Symbolic(_) => Err(input(format!("{}: iso needs a finite tree; symbolic trees are not supported", file.name))),
        },
        _ => Ok(parse_multitree(&file.name, &file.text)?),
    }
}

fn e0(action: &E0Action, witness: bool) -> Result<Outcome, CliError> {
    let epset = |p: &Path| -> Result<bisimkit_core::EpSet, CliError> {
        let f = load(p)?;
        Ok(parse_epset(&f.name, &f.text)?)
    };
    match action {
        E0Action::Check { x, y } => {
            let (x, y) = (epset(x)?, epset(y)?);
            let holds = x.e0(&y);
            let mut report = json!({ "verb": "e0 check", "e0": holds });
            if witness {
                report["symmetric_difference"] = serde_json::to_value(x.symmetric_difference(&y)).unwrap();
            }
            Ok(Outcome::new(holds, report, format!("{x} {} {y}", if holds { "E0" } else { "not E0" })))
        }
        E0Action::Reduce { x, depth, width } => {
            let x = epset(x)?;
            let b = build_b(&x);
            let rank = b_tree_rank(&x);
            let mut report = json!({ "verb": "e0 reduce", "tree": b, "tree_rank": ordinal_json(&rank) });
            if let Some(d) = depth {
                let t = sym_truncate(&b, *d, *width);
                report["truncation"] = serde_json::to_value(&t).unwrap();
            }
            Ok(Outcome::new(true, report, format!("B({x}) has tree rank {rank}")))
        }
        E0Action::Witness { x, y, bound } => {
            let (x, y) = (epset(x)?, epset(y)?);
            let r = b_bisim_report(&x, &y, *bound);
            let report = json!({
                "verb": "e0 witness",
                "bisimilar": r.bisimilar,
                "matching": r.matching,
                "distinguisher": r.distinguisher,
            });
            let summary = if r.bisimilar {
                format!("B({x}) ~ B({y}) by a child matching")
            } else {
                format!("B({x}) !~ B({y}): a formula separates them")
            };
            Ok(Outcome::new(r.bisimilar, report, summary))
        }
    }
}

fn substructure_verb(path: &Path, carrier: Option<&Path>, state: Option<&str>, sum: Option<&Path>) -> Result<Outcome, CliError> {
    let file = load(path)?;
    let n = parse_nlmp(&file.name, &file.text)?;
    if let Some(other) = sum {
        let of = load(other)?;
        let m = parse_nlmp(&of.name, &of.text)?;
        let s = sum_nlmp(&n, &m);
        let report = json!({ "verb": "substructure", "sum": nlmp_to_json(&s.process) });
        return Ok(Outcome::new(true, report, format!("sum with {} + {} states", s.left_size, s.right_size)));
    }
    let set: BTreeSet<usize> = match (carrier, state) {
        (Some(c), _) => {
            let cf = load(c)?;
            parse_carrier(&cf.name, &cf.text, &n)?
        }
        (None, Some(s)) => reach_a_s(&n, nlmp_state(&n, s)?),
        (None, None) => return Err(input("give --carrier, --state or --sum")),
    };
    let names: Vec<&String> = set.iter().map(|&i| &n.states()[i]).collect();
    match substructure(&n, &set) {
        Ok(sub) => {
            let report = json!({ "verb": "substructure", "carrier": names, "thick": true, "induced": nlmp_to_json(&sub.induced) });
            Ok(Outcome::new(true, report, format!("substructure on {} states", names.len())))
        }
        Err(e @ NlmpError::NotThick { .. }) => {
            let report = json!({ "verb": "substructure", "carrier": names, "thick": false, "reason": e.to_string() });
            Ok(Outcome::new(false, report, e.to_string()))
        }
        Err(e) => Err(input(e)),
    }
}

fn eval(path: &Path, formula: &Path, state: Option<&str>, kind: Option<Kind>) -> Result<Outcome, CliError> {
    let file = load(path)?;
    let ff = load(formula)?;
    let phi = parse_formula(&ff.name, &ff.text)?;
    let kind = match kind {
        Some(k) => k,
        None => detect(&file)?,
    };
    let (at, holds) = match kind {
        Kind::Lts => {
            let lts = parse_lts(&file.name, &file.text)?;
            let s = lts_state(&lts, state)?;
            (lts.states()[s].clone(), eval_formula(&lts, s, &phi).map_err(input)?)
        }
        Kind::Tree => match parse_tree(&file.name, &file.text)? {
            TreeInput::Symbolic(t) => ("root".to_string(), eval_symbolic(&t, &phi).map_err(input)?),
            TreeInput::Explicit(t) => ("()".to_string(), eval_explicit(&t, &phi)?),
        },
        _ => return Err(input("eval takes an LTS or a tree")),
    };
    let report = json!({ "verb": "eval", "state": at, "satisfied": holds });
    Ok(Outcome::new(holds, report, format!("{at} {} formula", if holds { "satisfies" } else { "does not satisfy" })))
}

fn eval_explicit(t: &ExplicitTree<u64>, phi: &bisimkit_core::ModalFormula) -> Result<bool, CliError> {
    let lts = f_process(t);
    eval_formula(&lts, 0, phi).map_err(input)
}

fn export_dot(path: &Path, kind: Option<Kind>, depth: usize, width: u64) -> Result<Outcome, CliError> {
    let file = load(path)?;
    let kind = match kind {
        Some(k) => k,
        None => detect(&file)?,
    };
    let dot = match kind {
        Kind::Lts => lts_dot(&parse_lts(&file.name, &file.text)?),
        Kind::Nlmp => nlmp_dot(&parse_nlmp(&file.name, &file.text)?),
        Kind::Code => lts_dot(&code_to_lts(&parse_code(&file.name, &file.text)?, 10_000).map_err(input)?),
        Kind::Multitree => multitree_dot(&parse_multitree(&file.name, &file.text)?),
        Kind::Tree => match parse_tree(&file.name, &file.text)? {
            TreeInput::Explicit(t) => explicit_tree_dot(&t),
            TreeInput::Symbolic(t) => explicit_tree_dot(&sym_truncate(&t, depth, width)),
        },
    };
    let mut out = Outcome::new(true, json!({ "verb": "export-dot" }), "dot");
    out.raw = Some(dot);
    Ok(out)
}
