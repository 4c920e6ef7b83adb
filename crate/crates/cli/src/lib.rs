//! Batch front end: each invocation names a verb and an action, loads the
//! named inputs, runs one operation and reports through an exit code.
//!
//! Exit code 0 means success, 1 a domain failure with a JSON witness on
//! stdout, and 2 a usage or parse error with a message on stderr.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sheafwork::cellsheaf::{Assignment, CellularSheaf, Extension};
use sheafwork::cohomology::{bayes_build, bayes_check, cochain_complex, cohomology_dims};
use sheafwork::galois::{check_connection, induced_operators, right_adjoint_of, GaloisConnection};
use sheafwork::io::{self, to_json_string};
use sheafwork::modal::{Modality, Negation};
use sheafwork::morphology::{self, composite_filter_lattice, morphology_connection, BinaryImage};
use sheafwork::{Direction, Error, FinitePoset};

/// One registered verb/action pair with the inputs it reads and the options
/// it accepts.
pub struct Action {
    pub verb: &'static str,
    pub action: &'static str,
    pub inputs: &'static [&'static str],
    pub options: &'static [&'static str],
    pub about: &'static str,
}

const fn act(
    verb: &'static str,
    action: &'static str,
    inputs: &'static [&'static str],
    options: &'static [&'static str],
    about: &'static str,
) -> Action {
    Action {
        verb,
        action,
        inputs,
        options,
        about,
    }
}

pub const ACTIONS: &[Action] = &[
    act("poset", "downsets", &["poset"], &[], "all downsets"),
    act("poset", "lattice", &["poset"], &[], "the downset lattice"),
    act("poset", "alexandrov", &["poset"], &["direction"], "opens of the Alexandrov topology"),
    act("poset", "yoneda", &["poset"], &[], "check the principal-downset embedding"),
    act("poset", "is-lattice", &["poset"], &[], "check for all binary joins and meets"),
    act("galois", "check", &["galois"], &[], "check a left/right pair"),
    act("galois", "right-adjoint", &["galois"], &[], "synthesize the right adjoint of the left map"),
    act("galois", "operators", &["galois"], &[], "closure and kernel operators"),
    act("morph", "dilate", &["image", "element"], &[], "dilation"),
    act("morph", "erode", &["image", "element"], &[], "erosion"),
    act("morph", "open", &["image", "element"], &[], "opening"),
    act("morph", "close", &["image", "element"], &[], "closing"),
    act("morph", "filters", &["image", "element"], &[], "the six composite filters"),
    act("morph", "adjunction", &["element"], &["width", "height"], "exhaustive adjunction check"),
    act("modal", "neg", &["graph", "subgraph"], &[], "Heyting negation"),
    act("modal", "coneg", &["graph", "subgraph"], &[], "co-Heyting negation"),
    act("modal", "boundary", &["graph", "subgraph"], &[], "boundary"),
    act("modal", "diamond", &["graph", "subgraph"], &[], "one diamond step"),
    act("modal", "box", &["graph", "subgraph"], &[], "one box step"),
    act("modal", "diamond-inf", &["graph", "subgraph"], &[], "diamond iterated to its fixpoint"),
    act("modal", "box-inf", &["graph", "subgraph"], &[], "box iterated to its fixpoint"),
    act("complex", "faces", &["complex"], &[], "the closed face list"),
    act("complex", "homology", &["complex"], &[], "Betti numbers over the rationals"),
    act("complex", "boundary", &["complex"], &["dim"], "boundary matrix"),
    act("presheaf", "validate", &["presheaf"], &[], "identity and composition laws"),
    act("presheaf", "check", &["presheaf"], &["cover", "target"], "locality and gluing for one cover"),
    act("presheaf", "is-sheaf", &["presheaf"], &[], "sheaf condition for every cover"),
    act("presheaf", "stalk", &["presheaf"], &["point"], "stalk at a point"),
    act("presheaf", "predict", &["presheaf"], &["from", "to", "section"], "propagate partial knowledge"),
    act("presheaf", "transfer", &["copresheaf"], &[], "sheaf on the Alexandrov space of a copresheaf"),
    act("sheaf", "validate", &["sheaf"], &[], "restriction maps compose along all paths"),
    act("sheaf", "extend", &["sheaf", "seed"], &[], "extend a partial assignment"),
    act("sheaf", "sections", &["sheaf"], &[], "basis of global sections"),
    act("sheaf", "check-section", &["sheaf", "assignment"], &[], "check a global assignment"),
    act("cohomology", "dims", &["sheaf"], &[], "cohomology dimensions"),
    act("cohomology", "coboundary", &["sheaf"], &["degree"], "coboundary matrix"),
    act("bayes", "build", &["model"], &[], "marginalization cosheaf, conditionals and joint"),
    act("bayes", "check", &["model", "joint"], &[], "check a joint distribution"),
];

/// Every input name used by some action.
pub fn input_names() -> Vec<&'static str> {
    let mut v: Vec<&str> = ACTIONS.iter().flat_map(|a| a.inputs.iter().copied()).collect();
    v.sort();
    v.dedup();
    v
}

pub fn option_names() -> Vec<&'static str> {
    let mut v: Vec<&str> = ACTIONS.iter().flat_map(|a| a.options.iter().copied()).collect();
    v.sort();
    v.dedup();
    v
}

pub fn verbs() -> Vec<&'static str> {
    let mut v: Vec<&str> = ACTIONS.iter().map(|a| a.verb).collect();
    v.dedup();
    v
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Command {
    pub verb: String,
    pub action: String,
    /// Input name to file path, or to inline JSON when the value starts with
    /// `{` or `[`.
    pub inputs: BTreeMap<String, String>,
    pub options: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(out: String) -> Self {
        Outcome {
            code: 0,
            stdout: out,
            stderr: String::new(),
        }
    }

    fn json(v: &Value) -> Self {
        Self::ok(to_json_string(v))
    }

    fn failure(witness: &Value) -> Self {
        Outcome {
            code: 1,
            stdout: to_json_string(witness),
            stderr: String::new(),
        }
    }

    fn verdict(holds: bool, report: &Value) -> Self {
        if holds {
            Self::json(report)
        } else {
            Self::failure(report)
        }
    }

    fn usage(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

enum Failure {
    Usage(String),
    Domain(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::NotMonotone(..) => "not-monotone",
            Error::NoAdjoint { .. } => "no-adjoint",
            Error::NotALattice(_) => "not-a-lattice",
            Error::NotAConnection(_) => "not-a-connection",
            Error::FixedPoint(_) => "fixed-point",
            Error::InvalidSheaf(_) => "invalid-sheaf",
            Error::InvalidPresheaf(_) => "invalid-presheaf",
            Error::InvalidModel(_) => "invalid-model",
            _ => return Failure::Usage(e.to_string()),
        };
        Failure::Domain(json!({ "error": kind, "detail": e.to_string() }))
    }
}

type Run = std::result::Result<Outcome, Failure>;

/// Dispatches `c`. Never panics on bad input; every problem becomes exit
/// code 1 or 2.
pub fn run(c: &Command) -> Outcome {
    let Some(spec) = ACTIONS.iter().find(|a| a.verb == c.verb && a.action == c.action) else {
        let known: Vec<&str> = ACTIONS.iter().filter(|a| a.verb == c.verb).map(|a| a.action).collect();
        return if known.is_empty() {
            Outcome::usage(format!("unknown verb {:?}; expected one of {}", c.verb, verbs().join(", ")))
        } else {
            Outcome::usage(format!(
                "unknown action {:?} for {}; expected one of {}",
                c.action,
                c.verb,
                known.join(", ")
            ))
        };
    };
    if let Some(missing) = spec.inputs.iter().find(|i| !c.inputs.contains_key(**i)) {
        return Outcome::usage(format!("{} {} needs --{missing}", c.verb, c.action));
    }
    if let Some(extra) = c.inputs.keys().find(|k| !spec.inputs.contains(&k.as_str())) {
        return Outcome::usage(format!("{} {} does not read --{extra}", c.verb, c.action));
    }
    if let Some(extra) = c.options.keys().find(|k| !spec.options.contains(&k.as_str())) {
        return Outcome::usage(format!("{} {} does not take --{extra}", c.verb, c.action));
    }
    let ctx = Ctx { c };
    let result = match c.verb.as_str() {
        "poset" => ctx.poset(),
        "galois" => ctx.galois(),
        "morph" => ctx.morph(),
        "modal" => ctx.modal(),
        "complex" => ctx.complex(),
        "presheaf" => ctx.presheaf(),
        "sheaf" => ctx.sheaf(),
        "cohomology" => ctx.cohomology(),
        "bayes" => ctx.bayes(),
        _ => unreachable!("registered verbs are all dispatched"),
    };
    match result {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => Outcome::usage(msg),
        Err(Failure::Domain(w)) => Outcome::failure(&w),
    }
}

struct Ctx<'a> {
    c: &'a Command,
}

fn is_inline(value: &str) -> bool {
    matches!(value.trim_start().chars().next(), Some('{' | '['))
}

impl Ctx<'_> {
    fn raw(&self, name: &str) -> std::result::Result<Vec<u8>, Failure> {
        let value = &self.c.inputs[name];
        if is_inline(value) {
            return Ok(value.as_bytes().to_vec());
        }
        std::fs::read(value).map_err(|e| Failure::Usage(format!("--{name} {value}: {e}")))
    }

    /// Parses input `name`, prefixing errors with where it came from.
    fn load<T>(&self, name: &str, parse: impl FnOnce(&[u8]) -> sheafwork::Result<T>) -> std::result::Result<T, Failure> {
        let bytes = self.raw(name)?;
        parse(&bytes).map_err(|e| Failure::Usage(format!("--{name}: {e}")))
    }

    fn option(&self, name: &str) -> Option<&str> {
        self.c.options.get(name).map(String::as_str)
    }

    fn required(&self, name: &str) -> std::result::Result<&str, Failure> {
        self.option(name)
            .ok_or_else(|| Failure::Usage(format!("{} {} needs --{name}", self.c.verb, self.c.action)))
    }

    fn number(&self, name: &str) -> std::result::Result<usize, Failure> {
        let v = self.required(name)?;
        v.parse()
            .map_err(|_| Failure::Usage(format!("--{name} expects a non-negative integer, found {v:?}")))
    }

    fn list(&self, name: &str) -> std::result::Result<Vec<String>, Failure> {
        let v = self.required(name)?;
        Ok(v.split(',').filter(|s| !s.is_empty()).map(str::to_string).collect())
    }

    fn sheaf_input(&self) -> std::result::Result<CellularSheaf, Failure> {
        let value = &self.c.inputs["sheaf"];
        let dir: PathBuf = if is_inline(value) {
            PathBuf::from(".")
        } else {
            Path::new(value).parent().map(Path::to_path_buf).unwrap_or_default()
        };
        self.load("sheaf", |bytes| {
            io::parse_sheaf_with(bytes, |p| {
                let path = dir.join(p);
                std::fs::read(&path).map_err(|e| Error::Schema {
                    path: "$.complex".into(),
                    message: format!("{}: {e}", path.display()),
                })
            })
        })
    }

    fn poset(&self) -> Run {
        let p = self.load("poset", io::parse_poset)?;
        match self.c.action.as_str() {
            "downsets" => Ok(Outcome::json(&json!(p.all_downsets()?))),
            "lattice" => Ok(Outcome::json(&io::emit_poset(&p.downset_lattice()?))),
            "alexandrov" => {
                let dir = match self.option("direction").unwrap_or("up") {
                    "up" => Direction::Up,
                    "down" => Direction::Down,
                    other => return Err(Failure::Usage(format!("--direction expects up or down, found {other:?}"))),
                };
                let t = p.alexandrov(dir)?;
                let opens: Vec<_> = t.opens().iter().map(|&m| t.labels(m)).collect();
                Ok(Outcome::json(&json!(opens)))
            }
            "yoneda" => {
                let holds = p.yoneda_check()?;
                Ok(Outcome::verdict(holds, &json!({ "holds": holds })))
            }
            "is-lattice" => {
                let holds = p.is_lattice();
                Ok(Outcome::verdict(holds, &json!({ "lattice": holds })))
            }
            _ => unreachable!(),
        }
    }

    fn galois(&self) -> Run {
        let g = self.load("galois", io::parse_galois)?;
        match self.c.action.as_str() {
            "check" => {
                let right = g
                    .right
                    .ok_or_else(|| Failure::Usage("--galois: galois check needs a \"right\" map".into()))?;
                let c = GaloisConnection::new(g.source, g.target, g.left, right)?;
                let report = check_connection(&c);
                Ok(Outcome::verdict(report.holds, &json!(report)))
            }
            "right-adjoint" => {
                let right = right_adjoint_of(&g.left, &g.source, &g.target)?;
                let c = GaloisConnection::new(g.source, g.target, g.left, right)?;
                Ok(Outcome::json(&io::emit_galois(&c)))
            }
            "operators" => {
                let right = match g.right {
                    Some(r) => r,
                    None => right_adjoint_of(&g.left, &g.source, &g.target)?,
                };
                let c = GaloisConnection::new(g.source, g.target, g.left, right)?;
                let ops = induced_operators(&c)?;
                let show = |p: &FinitePoset, m: &[usize]| p.label_map(p, m);
                Ok(Outcome::json(&json!({
                    "closure": show(c.source(), &ops.closure.map),
                    "kernel": show(c.target(), &ops.kernel.map),
                    "closed": ops.closure.fixed_points().iter().map(|&i| c.source().label(i)).collect::<Vec<_>>(),
                    "open": ops.kernel.fixed_points().iter().map(|&i| c.target().label(i)).collect::<Vec<_>>(),
                })))
            }
            _ => unreachable!(),
        }
    }

    fn morph(&self) -> Run {
        let b = self.load("element", io::parse_structuring_element)?;
        if self.c.action == "adjunction" {
            let (w, h) = (self.number("width")?, self.number("height")?);
            let (c, _) = morphology_connection(w, h, &b)?;
            let report = check_connection(&c);
            return Ok(Outcome::verdict(report.holds, &json!(report)));
        }
        let x = self.load("image", io::parse_bitmap)?;
        let image = |img: BinaryImage| Outcome::ok(io::emit_bitmap(&img));
        match self.c.action.as_str() {
            "dilate" => Ok(image(morphology::dilate(&x, &b))),
            "erode" => Ok(image(morphology::erode(&x, &b))),
            "open" => Ok(image(morphology::opening(&x, &b))),
            "close" => Ok(image(morphology::closing(&x, &b))),
            "filters" => {
                let report = composite_filter_lattice(&x, &b);
                let filters: BTreeMap<&String, Vec<String>> = report
                    .filters
                    .iter()
                    .map(|(k, v)| (k, io::emit_bitmap(v).lines().map(str::to_string).collect()))
                    .collect();
                let mut out = json!(report);
                out["filters"] = json!(filters);
                Ok(Outcome::verdict(report.holds(), &out))
            }
            _ => unreachable!(),
        }
    }

    fn modal(&self) -> Run {
        let g = self.load("graph", io::parse_graph)?;
        let s = self.load("subgraph", |d| io::parse_subgraph(&g, d))?;
        let r = match self.c.action.as_str() {
            "neg" => g.negate(&s, Negation::Heyting),
            "coneg" => g.negate(&s, Negation::Coheyting),
            "boundary" => g.boundary(&s),
            "diamond" => g.step(&s, Modality::Diamond),
            "box" => g.step(&s, Modality::Box),
            "diamond-inf" => g.diamond_inf(&s),
            "box-inf" => g.box_inf(&s),
            _ => unreachable!(),
        };
        Ok(Outcome::json(&io::emit_subgraph(&g, &r)))
    }

    fn complex(&self) -> Run {
        let c = self.load("complex", io::parse_complex)?;
        match self.c.action.as_str() {
            "faces" => Ok(Outcome::json(&io::emit_complex(&c))),
            "homology" => Ok(Outcome::json(&json!(c.homology_dims()))),
            "boundary" => Ok(Outcome::json(&io::emit_matrix(&c.boundary_matrix(self.number("dim")?)))),
            _ => unreachable!(),
        }
    }

    fn presheaf(&self) -> Run {
        if self.c.action == "transfer" {
            let f = self.load("copresheaf", io::parse_copresheaf)?;
            let p = sheafwork::finsheaf::poset_transfer(&f)?;
            return Ok(Outcome::json(&io::emit_presheaf(&p)));
        }
        let p = self.load("presheaf", io::parse_presheaf)?;
        match self.c.action.as_str() {
            "validate" => {
                let r = p.validate();
                Ok(Outcome::verdict(r.valid, &json!(r)))
            }
            "check" => {
                let cover = self.list("cover")?;
                let cover: Vec<&str> = cover.iter().map(String::as_str).collect();
                let r = p.sheaf_check(&cover, self.required("target")?)?;
                Ok(Outcome::verdict(r.holds(), &json!(r)))
            }
            "is-sheaf" => {
                let failures = p.sheaf_failures();
                let holds = failures.is_empty();
                Ok(Outcome::verdict(holds, &json!({ "is_sheaf": holds, "failures": failures })))
            }
            "stalk" => Ok(Outcome::json(&json!(p.stalk_at(self.required("point")?)?))),
            "predict" => {
                let known = self.list("section")?;
                let out = p.predict(self.required("from")?, self.required("to")?, &known)?;
                Ok(Outcome::json(&json!(out)))
            }
            _ => unreachable!(),
        }
    }

    fn sheaf(&self) -> Run {
        let s = self.sheaf_input()?;
        match self.c.action.as_str() {
            "validate" => {
                let r = s.validate();
                Ok(Outcome::verdict(r.valid, &json!(r)))
            }
            "extend" => {
                let seed = self.load("seed", io::parse_assignment)?;
                match s.extend(&seed)? {
                    Extension::Extended(a) => Ok(Outcome::json(&json!({ "extended": io::emit_assignment(&a) }))),
                    Extension::Obstructed {
                        obstruction,
                        kind,
                        determined,
                        detail,
                    } => Ok(Outcome::failure(&json!({
                        "obstruction": obstruction,
                        "kind": kind,
                        "determined": io::emit_assignment(&determined),
                        "detail": detail,
                    }))),
                }
            }
            "sections" => {
                let space = s.global_section_space();
                let basis: Vec<Value> = space.basis.iter().map(io::emit_assignment).collect();
                Ok(Outcome::json(&json!({ "dimension": space.dimension, "basis": basis })))
            }
            "check-section" => {
                let a: Assignment = self.load("assignment", io::parse_assignment)?;
                let r = s.is_global_section(&a)?;
                Ok(Outcome::verdict(r.is_section, &json!(r)))
            }
            _ => unreachable!(),
        }
    }

    fn cohomology(&self) -> Run {
        let s = self.sheaf_input()?;
        match self.c.action.as_str() {
            "dims" => Ok(Outcome::json(&json!(cohomology_dims(&s)?))),
            "coboundary" => {
                let cc = cochain_complex(&s)?;
                Ok(Outcome::json(&io::emit_matrix(&cc.delta(self.number("degree")?))))
            }
            _ => unreachable!(),
        }
    }

    fn bayes(&self) -> Run {
        let m = self.load("model", io::parse_bayes)?;
        match self.c.action.as_str() {
            "build" => {
                let b = bayes_build(&m)?;
                let conditionals: Vec<Value> = b
                    .conditionals
                    .iter()
                    .map(|c| {
                        json!({
                            "from": c.from,
                            "to": c.to,
                            "variable": c.variable,
                            "matrix": io::emit_matrix(&c.matrix),
                        })
                    })
                    .collect();
                Ok(Outcome::json(&json!({
                    "cosheaf": io::emit_sheaf(&b.cosheaf),
                    "conditionals": conditionals,
                    "joint": io::emit_vector(&b.joint),
                })))
            }
            "check" => {
                let joint = self.load("joint", io::parse_vector)?;
                let r = bayes_check(&m, &joint)?;
                Ok(Outcome::verdict(r.holds, &json!(r)))
            }
            _ => unreachable!(),
        }
    }
}
