#![allow(dead_code)]

use std::path::{Path, PathBuf};

use amcm::lang::{ComAst, ExpAst};
use amcm::machine::{ErrorKind, MachineError, MachineState, Memory};
use amcm::templating::{parse_content, ContentStore, PersonalizationContext};
use amcm::{Literal, Pos, Value};
use rand::Rng;

// ---- fuzz grammar -------------------------------------------------------

pub const IDENTS: [&str; 3] = ["a", "b", "c"];

pub fn literal_pool() -> [Literal; 6] {
    [
        Literal::Int(0),
        Literal::Int(1),
        Literal::Text(String::new()),
        Literal::Text("x".into()),
        Literal::Bool(true),
        Literal::Bool(false),
    ]
}

/// Identifiers, literals, `read()` and one present and one absent content
/// path.
pub fn atom_pool() -> Vec<ExpAst> {
    let mut atoms: Vec<ExpAst> = IDENTS.iter().map(|i| ExpAst::ident(*i)).collect();
    atoms.extend(literal_pool().into_iter().map(ExpAst::lit));
    atoms.push(ExpAst::read());
    atoms.push(ExpAst::content("greeting"));
    atoms.push(ExpAst::content("missing"));
    atoms
}

/// Atoms plus comparisons covering bound/unbound operands, mixed tags and
/// input consumption.
pub fn exhaustive_expressions() -> Vec<ExpAst> {
    let mut exps = atom_pool();
    exps.push(ExpAst::eq(ExpAst::ident("a"), ExpAst::lit(1)));
    exps.push(ExpAst::neq(ExpAst::ident("a"), ExpAst::lit("x")));
    exps.push(ExpAst::eq(ExpAst::read(), ExpAst::lit(1)));
    exps.push(ExpAst::eq(ExpAst::ident("b"), ExpAst::ident("c")));
    exps
}

/// Every assignment and emit over [`exhaustive_expressions`], plus
/// conditionals over four conditions and two branch shapes each way.
pub fn exhaustive_commands() -> Vec<ComAst> {
    let exps = exhaustive_expressions();
    let mut cmds = Vec::new();
    for i in IDENTS {
        for e in &exps {
            cmds.push(ComAst::assign(i, e.clone()));
        }
    }
    for e in &exps {
        cmds.push(ComAst::emit(e.clone()));
    }
    let conds = [
        ExpAst::ident("a"),
        ExpAst::lit(true),
        ExpAst::eq(ExpAst::ident("a"), ExpAst::lit(1)),
        ExpAst::eq(ExpAst::read(), ExpAst::lit(1)),
    ];
    let thens = [ComAst::emit(ExpAst::ident("a")), ComAst::assign("a", ExpAst::lit(1))];
    let elses = [None, Some(ComAst::assign("b", ExpAst::lit("x")))];
    for c in &conds {
        for t in &thens {
            for e in &elses {
                cmds.push(ComAst::if_(c.clone(), t.clone(), e.clone()));
            }
        }
    }
    cmds
}

/// Every sequence of at most `max` commands from `pool`, the empty program
/// included.
pub fn all_programs(pool: &[ComAst], max: u32) -> impl Iterator<Item = ComAst> + '_ {
    (0..=max).flat_map(move |len| {
        (0..pool.len().pow(len)).map(move |mut idx| {
            let mut cmds = Vec::with_capacity(len as usize);
            for _ in 0..len {
                cmds.push(pool[idx % pool.len()].clone());
                idx /= pool.len();
            }
            ComAst::seq(cmds)
        })
    })
}

pub fn random_literal(rng: &mut impl Rng) -> Literal {
    let pool = literal_pool();
    pool[rng.random_range(0..pool.len())].clone()
}

pub fn random_atom(rng: &mut impl Rng) -> ExpAst {
    let pool = atom_pool();
    pool[rng.random_range(0..pool.len())].clone()
}

pub fn random_exp(rng: &mut impl Rng) -> ExpAst {
    match rng.random_range(0..10) {
        0..=6 => random_atom(rng),
        7 | 8 => ExpAst::eq(random_atom(rng), random_atom(rng)),
        _ => ExpAst::neq(random_atom(rng), random_atom(rng)),
    }
}

pub fn random_com(rng: &mut impl Rng, depth: u32) -> ComAst {
    if depth > 0 && rng.random_bool(0.2) {
        let then = random_block(rng, depth - 1);
        let otherwise = rng.random_bool(0.5).then(|| random_block(rng, depth - 1));
        return ComAst::if_(random_exp(rng), then, otherwise);
    }
    if rng.random_bool(0.6) {
        ComAst::assign(IDENTS[rng.random_range(0..IDENTS.len())], random_exp(rng))
    } else {
        ComAst::emit(random_exp(rng))
    }
}

fn random_block(rng: &mut impl Rng, depth: u32) -> ComAst {
    let n = rng.random_range(1..=2);
    ComAst::seq((0..n).map(|_| random_com(rng, depth)).collect::<Vec<_>>())
}

/// Up to `max` top-level commands, conditionals nested at most twice.
pub fn random_program(rng: &mut impl Rng, max: usize) -> ComAst {
    let n = rng.random_range(0..=max);
    ComAst::seq((0..n).map(|_| random_com(rng, 2)).collect::<Vec<_>>())
}

pub fn random_input(rng: &mut impl Rng) -> Vec<Value> {
    let n = rng.random_range(0..=2);
    (0..n).map(|_| random_literal(rng).into()).collect()
}

pub fn random_value(rng: &mut impl Rng) -> Value {
    match rng.random_range(0..8) {
        0 => Value::Markup(format!("<b>{}</b>", rng.random_range(0..5))),
        1 => Value::List(amcm::ContentType::Int, (0..rng.random_range(0..3)).map(Value::Int).collect()),
        _ => random_literal(rng).into(),
    }
}

/// A machine state over identifiers `a`..`e` with short input and output.
pub fn random_state(rng: &mut impl Rng) -> MachineState {
    let mut memory = Memory::new();
    for name in ["a", "b", "c", "d", "e"] {
        if rng.random_bool(0.5) {
            memory = memory.substitute(name, random_value(rng));
        }
    }
    MachineState {
        memory,
        input: (0..rng.random_range(0..3)).map(|_| random_value(rng)).collect(),
        output: (0..rng.random_range(0..3)).map(|_| random_value(rng)).collect(),
    }
}

/// Store for the fuzz grammar: `greeting` varies by registration status.
pub fn fuzz_store() -> ContentStore {
    let greeting = parse_content(
        "greeting",
        "type: Text\nvariant p=registered:\n---\nWelcome back!\nvariant default:\n---\nWelcome, guest!\n",
    )
    .unwrap();
    std::iter::once(greeting).collect::<Result<ContentStore, _>>().unwrap()
}

pub fn registered() -> PersonalizationContext {
    PersonalizationContext::with_status("registered")
}

/// What two evaluators must agree on: the final state, or the error's
/// kind, subject and position.
pub type Outcome = Result<MachineState, (ErrorKind, String, Pos)>;

pub fn outcome(r: Result<MachineState, MachineError>) -> Outcome {
    r.map_err(|e| (e.kind, e.subject, e.pos))
}

// ---- fixtures -----------------------------------------------------------

pub fn fixture_project() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/project")
}

/// Copies the fixture project, minus any output directory, into `dest`.
pub fn copy_project(dest: &Path) -> PathBuf {
    let src = fixture_project();
    for entry in walkdir::WalkDir::new(&src) {
        let entry = entry.unwrap();
        let rel = entry.path().strip_prefix(&src).unwrap();
        if rel.starts_with("out") {
            continue;
        }
        let target = dest.join(rel);
        if entry.file_type().is_dir() {
            std::fs::create_dir_all(&target).unwrap();
        } else {
            std::fs::copy(entry.path(), &target).unwrap();
        }
    }
    dest.join("amcm.conf")
}

// ---- conceptual-model oracle --------------------------------------------

/// Value of one attribute in the exhaustive model space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attr {
    /// Equal to the literal used in formulas.
    Lit,
    /// Same type, different value.
    Other,
    Absent,
}

pub const ATTRS: [Attr; 3] = [Attr::Lit, Attr::Other, Attr::Absent];

/// The nine attribute configurations for two concepts: `(rank.n, tag.s)`.
pub fn configs() -> Vec<(Attr, Attr)> {
    ATTRS.iter().flat_map(|&a| ATTRS.iter().map(move |&b| (a, b))).collect()
}

/// Formula skeleton evaluated by the oracle without touching the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum F {
    True,
    False,
    /// `rank.n == 1` (negated when the flag is false)
    Rank(bool),
    /// `tag.s == "u"` (negated when the flag is false)
    Tag(bool),
    /// Membership in a named level-1 object, given by its member indices.
    In(String, Vec<usize>),
    Not(Box<F>),
    And(Box<F>, Box<F>),
    Or(Box<F>, Box<F>),
}

impl F {
    pub fn to_formula(&self) -> amcm::cdm::Formula {
        use amcm::cdm::Formula;
        match self {
            F::True => Formula::True,
            F::False => Formula::False,
            F::Rank(true) => Formula::attr_eq("rank", "n", 1),
            F::Rank(false) => Formula::attr_neq("rank", "n", 1),
            F::Tag(true) => Formula::attr_eq("tag", "s", "u"),
            F::Tag(false) => Formula::attr_neq("tag", "s", "u"),
            F::In(name, _) => Formula::in_object(name),
            F::Not(a) => Formula::not(a.to_formula()),
            F::And(a, b) => Formula::and(a.to_formula(), b.to_formula()),
            F::Or(a, b) => Formula::or(a.to_formula(), b.to_formula()),
        }
    }

    /// Truth at individual `i` whose attributes are `cfg`.
    pub fn at_individual(&self, i: usize, cfg: (Attr, Attr)) -> bool {
        match self {
            F::True => true,
            F::False => false,
            F::Rank(eq) => (cfg.0 == Attr::Lit) == *eq,
            F::Tag(eq) => (cfg.1 == Attr::Lit) == *eq,
            F::In(_, members) => members.contains(&i),
            F::Not(a) => !a.at_individual(i, cfg),
            F::And(a, b) => a.at_individual(i, cfg) && b.at_individual(i, cfg),
            F::Or(a, b) => a.at_individual(i, cfg) || b.at_individual(i, cfg),
        }
    }

    /// Truth at a set of individuals: atoms must hold for every member.
    pub fn at_set(&self, set: &[usize], cfgs: &[(Attr, Attr)]) -> bool {
        match self {
            F::True => true,
            F::False => false,
            F::Not(a) => !a.at_set(set, cfgs),
            F::And(a, b) => a.at_set(set, cfgs) && b.at_set(set, cfgs),
            F::Or(a, b) => a.at_set(set, cfgs) || b.at_set(set, cfgs),
            atom => set.iter().all(|&i| atom.at_individual(i, cfgs[i])),
        }
    }
}

/// All formulas of depth at most `depth` over `atoms`, shallow first.
pub fn formulas(atoms: &[F], depth: usize) -> Vec<F> {
    let mut all: Vec<F> = atoms.to_vec();
    for _ in 1..depth {
        let prev = all.clone();
        let mut next = atoms.to_vec();
        for a in &prev {
            next.push(F::Not(Box::new(a.clone())));
        }
        for a in &prev {
            for b in &prev {
                next.push(F::And(Box::new(a.clone()), Box::new(b.clone())));
            }
        }
        for a in &prev {
            for b in &prev {
                next.push(F::Or(Box::new(a.clone()), Box::new(b.clone())));
            }
        }
        all = next;
    }
    all
}

pub fn base_atoms() -> Vec<F> {
    vec![F::True, F::False, F::Rank(true), F::Rank(false), F::Tag(true), F::Tag(false)]
}

/// `domain d` with concepts `rank : Int fns(n)` and `tag : Text fns(s)` and
/// one individual `i<k>` per configuration.
pub fn model_source(cfgs: &[(Attr, Attr)]) -> String {
    let mut src = String::from("domain d;\nconcept rank over d : Int fns(n);\nconcept tag over d : Text fns(s);\n");
    for (k, (r, t)) in cfgs.iter().enumerate() {
        src.push_str(&format!("individual d.i{k} {{"));
        match r {
            Attr::Lit => src.push_str(" rank.n = 1;"),
            Attr::Other => src.push_str(" rank.n = 2;"),
            Attr::Absent => {}
        }
        match t {
            Attr::Lit => src.push_str(" tag.s = \"u\";"),
            Attr::Other => src.push_str(" tag.s = \"v\";"),
            Attr::Absent => {}
        }
        src.push_str(" }\n");
    }
    src
}

/// Subsets of `0..n` with at most `max` elements, as sorted index lists.
pub fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize <= max)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}
