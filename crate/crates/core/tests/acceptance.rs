//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use amcm::cdm::{parse_model, Element, ModelError, ObjectDecl, StateId};
use amcm::lang::{parse_context, parse_program_source, ComAst, ExpAst};
use amcm::machine::{bind_value, eval_expr, exec_com, run, run_small_step, Env, ErrorKind, MachineState};
use amcm::templating::{load_store, resolve_variant, ContentStore, PersonalizationContext};
use amcm::translate::{emit_load_program, mangle, parse_ddl, translate_ddl};
use amcm::{ContentType, Value};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Wall-clock limit for the evaluator-equivalence sweep.
const EQUIVALENCE_BUDGET: Duration = Duration::from_secs(60);
const RANDOM_PROGRAMS: usize = 10_000;
const RANDOM_PROGRAM_MAX_COMMANDS: usize = 6;
const EXHAUSTIVE_MAX_COMMANDS: u32 = 3;
const RANDOM_STATES: usize = 2_000;
const RENDER_REPEATS: usize = 10;
const PERSONALIZATION_TRIALS: usize = 2_000;
const SEED: u64 = 0x5eed_acce;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 9] = [
        ("evaluator equivalence", evaluator_equivalence),
        ("semantic-rule conformance", semantic_rules),
        ("comprehension oracle", comprehension_oracle),
        ("individualization law", individualization_law),
        ("metalevel membership", metalevel_membership),
        ("render determinism and no holes", render_determinism),
        ("personalization resolution", personalization),
        ("translator round-trip", translator_round_trip),
        ("cli contract", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1 -----------------------------------------------------------------------

fn evaluator_equivalence() -> Verdict {
    let start = Instant::now();
    let store = fuzz_store();
    let anon = PersonalizationContext::default();
    let reg = registered();
    let pool = exhaustive_commands();
    let mut mismatches = Vec::new();
    let compare = |program: &ComAst, input: Vec<Value>, ctx: &PersonalizationContext| {
        let env = Env::new(&store, ctx);
        let big = outcome(run(program, input.clone(), &env));
        let small = outcome(run_small_step(program, input, &env));
        (big != small).then(|| format!("{program:?}: {big:?} vs {small:?}"))
    };
    let mut exhaustive = 0usize;
    for program in all_programs(&pool, EXHAUSTIVE_MAX_COMMANDS) {
        mismatches.extend(compare(&program, vec![Value::Int(1)], &anon));
        exhaustive += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..RANDOM_PROGRAMS {
        let program = random_program(&mut rng, RANDOM_PROGRAM_MAX_COMMANDS);
        let input = random_input(&mut rng);
        let ctx = if rng.random_bool(0.5) { &reg } else { &anon };
        mismatches.extend(compare(&program, input, ctx));
    }
    mismatches.truncate(3);
    let elapsed = start.elapsed();
    ensure(mismatches.is_empty(), || format!("disagreements: {}", mismatches.join("; ")))?;
    ensure(elapsed < EQUIVALENCE_BUDGET, || format!("took {elapsed:?}, limit {EQUIVALENCE_BUDGET:?}"))?;
    Ok(format!(
        "{exhaustive} exhaustive programs (<= {EXHAUSTIVE_MAX_COMMANDS} commands) + {RANDOM_PROGRAMS} random (<= {RANDOM_PROGRAM_MAX_COMMANDS}), 100% agreement in {:.1}s (limit {}s)",
        elapsed.as_secs_f64(),
        EQUIVALENCE_BUDGET.as_secs()
    ))
}

// 2 -----------------------------------------------------------------------

fn semantic_rules() -> Verdict {
    let store = fuzz_store();
    let ctx = PersonalizationContext::default();
    let env = Env::new(&store, &ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let names = ["a", "b", "c", "d", "e", "zz"];
    for _ in 0..RANDOM_STATES {
        let state = random_state(&mut rng);

        // constants
        for lit in literal_pool() {
            let (v, after) = eval_expr(&ExpAst::lit(lit.clone()), state.clone(), &env).map_err(|e| e.to_string())?;
            ensure(v == Value::from(lit) && after == state, || "constant changed the state".into())?;
        }

        // identifiers
        for name in names {
            let r = eval_expr(&ExpAst::ident(name), state.clone(), &env);
            match (state.memory.get(name), r) {
                (Some(v), Ok((w, after))) => ensure(*v == w && after == state, || format!("lookup of `{name}` misbehaved"))?,
                (None, Err(e)) => ensure(e.kind == ErrorKind::UnboundIdentifier && e.subject == name, || {
                    format!("unbound `{name}` gave {e}")
                })?,
                (bound, r) => return Err(format!("`{name}` bound={} but result {r:?}", bound.is_some())),
            }
        }

        // assignment is m[v/I] and touches nothing else
        let target = IDENTS[rng.random_range(0..IDENTS.len())];
        let e = random_exp(&mut rng);
        let assigned = exec_com(&ComAst::assign(target, e.clone()), state.clone(), &env);
        match (eval_expr(&e, state.clone(), &env), assigned) {
            (Ok((v, mid)), Ok(after)) => {
                ensure(after.memory == mid.memory.clone().substitute(target, v.clone()), || "not m[v/I]".into())?;
                for name in names.iter().filter(|n| **n != target) {
                    ensure(after.memory.get(name) == mid.memory.get(name), || format!("frame broken at `{name}`"))?;
                }
                ensure(after.input == mid.input && after.output == mid.output, || "input/output changed".into())?;
            }
            (Err(a), Err(b)) => ensure(a.kind == b.kind, || "different error kinds".into())?,
            (a, b) => return Err(format!("expression {a:?} but assignment {b:?}")),
        }

        // type-checked binding
        let v = random_value(&mut rng);
        let slot_ty = [ContentType::Text, ContentType::Int, ContentType::Bool, ContentType::Markup][rng.random_range(0..4)].clone();
        match bind_value(state.memory.clone(), &slot_ty, "slot", v.clone()) {
            Ok(m) => ensure(v.tag() == slot_ty && m.get("slot") == Some(&v), || "ill-typed binding accepted".into())?,
            Err(e) => ensure(v.tag() != slot_ty && e.kind == ErrorKind::TypeIncompatibility, || {
                format!("well-typed binding rejected: {e}")
            })?,
        }
    }
    Ok(format!("constants, unbound lookup, m[v/I] frame, typed binding over {RANDOM_STATES} random states"))
}

// 3, 4 ---------------------------------------------------------------------

struct Space {
    cfgs: Vec<(amcm::cdm::Formula, F)>,
    states: Vec<Vec<usize>>,
    model: amcm::cdm::DomainModel,
    attrs: Vec<(Attr, Attr)>,
}

fn exhaustive_space() -> Space {
    let attrs = configs();
    let states = subsets(attrs.len(), 6);
    let mut src = model_source(&attrs);
    for (k, members) in states.iter().enumerate() {
        let ids: Vec<String> = members.iter().map(|i| format!("i{i}")).collect();
        src.push_str(&format!("state s{k} d = {{ {} }};\n", ids.join(", ")));
    }
    let model = parse_model(&src).expect("generated model parses");
    let cfgs = formulas(&base_atoms(), 3).into_iter().map(|f| (f.to_formula(), f)).collect();
    Space { cfgs, states, model, attrs }
}

fn comprehension_oracle() -> Verdict {
    let space = exhaustive_space();
    let mut checked = 0usize;
    for (formula, oracle) in &space.cfgs {
        for (k, members) in space.states.iter().enumerate() {
            let state = StateId(format!("s{k}"));
            let got = space.model.comprehend("d", formula, &state, "o").map_err(|e| e.to_string())?;
            let want: BTreeSet<Element> = members
                .iter()
                .filter(|&&i| oracle.at_individual(i, space.attrs[i]))
                .map(|i| Element::individual(&format!("i{i}")))
                .collect();
            if *got.extension() != want {
                return Err(format!("{formula} at s{k}: got {:?}, want {want:?}", got.extension()));
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{} formulas (depth <= 3) x {} domains (|D| <= 6) = {checked} comprehensions, 0 mismatches",
        space.cfgs.len(),
        space.states.len()
    ))
}

fn individualization_law() -> Verdict {
    let space = exhaustive_space();
    let (mut found, mut not_found, mut not_unique) = (0usize, 0usize, 0usize);
    for (formula, oracle) in &space.cfgs {
        for (k, members) in space.states.iter().enumerate() {
            let state = StateId(format!("s{k}"));
            let sat: Vec<usize> = members.iter().copied().filter(|&i| oracle.at_individual(i, space.attrs[i])).collect();
            match (space.model.individualize("d", formula, &state), sat.as_slice()) {
                (Ok(id), [one]) if id == format!("i{one}") => found += 1,
                (Err(ModelError::NotFound { count: 0 }), []) => not_found += 1,
                (Err(ModelError::NotUnique { count }), s) if s.len() > 1 && count == s.len() => not_unique += 1,
                (got, _) => return Err(format!("{formula} at s{k}: got {got:?}, oracle count {}", sat.len())),
            }
        }
    }
    Ok(format!("{found} unique, {not_found} NotFound, {not_unique} NotUnique; all counts match brute force"))
}

// 5 -----------------------------------------------------------------------

fn metalevel_membership() -> Verdict {
    // four individuals with distinct attribute configurations
    let attrs: Vec<(Attr, Attr)> =
        vec![(Attr::Lit, Attr::Lit), (Attr::Lit, Attr::Other), (Attr::Other, Attr::Lit), (Attr::Absent, Attr::Absent)];
    let domains = subsets(4, 4);
    let mut src = model_source(&attrs);
    for (k, members) in domains.iter().enumerate() {
        let ids: Vec<String> = members.iter().map(|i| format!("i{i}")).collect();
        src.push_str(&format!("state s{k} d = {{ {} }};\n", ids.join(", ")));
    }
    let base_model = parse_model(&src).map_err(|e| e.to_string())?;

    let mut atoms = base_atoms();
    atoms.push(F::In("ranked".into(), Vec::new()));
    let shapes = formulas(&atoms, 2);
    let mut checked = 0usize;
    for (k, domain) in domains.iter().enumerate() {
        let state = StateId(format!("s{k}"));
        let ranked: Vec<usize> = domain.iter().copied().filter(|&i| attrs[i].0 == Attr::Lit).collect();
        let model = base_model
            .clone()
            .define_object(decl("all", "d", F::True.to_formula(), &state))
            .and_then(|m| m.define_object(decl("ranked", "d", F::Rank(true).to_formula(), &state)))
            .map_err(|e| e.to_string())?;
        let level1: Vec<Element> = domain.iter().map(|i| Element::individual(&format!("i{i}"))).collect();
        for shape in &shapes {
            let oracle = with_members(shape, &ranked);
            let obj = model.comprehend("all", &shape.to_formula(), &state, "meta").map_err(|e| e.to_string())?;
            if obj.level() != 2 {
                return Err(format!("level {} for a comprehension over a level-1 object", obj.level()));
            }
            let mut want = BTreeSet::new();
            for subset in subsets(domain.len(), domain.len()) {
                let chosen: Vec<usize> = subset.iter().map(|&j| domain[j]).collect();
                let element = Element::Set(
                    amcm::cdm::ElementSet::new(1, subset.iter().map(|&j| level1[j].clone())).expect("level-1 set"),
                );
                let holds = oracle.at_set(&chosen, &attrs);
                if obj.member(&element).map_err(|e| e.to_string())? != holds {
                    return Err(format!("membership of {element} in {{x in all | {}}} at s{k}", shape.to_formula()));
                }
                if holds {
                    want.insert(element);
                }
                checked += 1;
            }
            if *obj.extension() != want {
                return Err(format!("extension of {{x in all | {}}} at s{k}", shape.to_formula()));
            }
        }
    }
    Ok(format!(
        "{} level-2 formulas x {} base domains, {checked} candidate sets, 0 mismatches",
        shapes.len(),
        domains.len()
    ))
}

fn decl(name: &str, base: &str, formula: amcm::cdm::Formula, state: &StateId) -> ObjectDecl {
    ObjectDecl { name: name.into(), base: base.into(), formula, state: state.clone(), unique: false }
}

fn with_members(f: &F, members: &[usize]) -> F {
    match f {
        F::In(name, _) => F::In(name.clone(), members.to_vec()),
        F::Not(a) => F::Not(Box::new(with_members(a, members))),
        F::And(a, b) => F::And(Box::new(with_members(a, members)), Box::new(with_members(b, members))),
        F::Or(a, b) => F::Or(Box::new(with_members(a, members)), Box::new(with_members(b, members))),
        other => other.clone(),
    }
}

// 6 -----------------------------------------------------------------------

fn amcm(conf: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amcm"))
        .args(args)
        .env("AMCM_PROJECT", conf)
        .current_dir(conf.parent().unwrap())
        .output()
        .expect("amcm runs")
}

fn render_determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let conf = copy_project(dir.path());
    let out_dir = dir.path().join("out");
    let cases: [(&str, Option<&str>); 4] = [
        ("page", None),
        ("page", Some("contexts/registered.ctx")),
        ("page", Some("contexts/anonymous_en.ctx")),
        ("news", None),
    ];
    for (template, ctx) in cases {
        let mut args = vec!["render", template];
        if let Some(c) = ctx {
            args.extend(["--context", c]);
        }
        let mut first: Option<(Vec<u8>, Vec<u8>)> = None;
        for _ in 0..RENDER_REPEATS {
            let out = amcm(&conf, &args);
            ensure(out.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))?;
            let page = std::fs::read(out_dir.join(format!("{template}.html"))).map_err(|e| e.to_string())?;
            ensure(!String::from_utf8_lossy(&page).contains("{{"), || format!("{args:?} left a hole"))?;
            match &first {
                None => first = Some((page, out.stdout)),
                Some((p, s)) => ensure(*p == page && *s == out.stdout, || format!("{args:?} differs between runs"))?,
            }
        }
    }
    Ok(format!("{} renders x {RENDER_REPEATS} runs byte-identical, no `{{{{` in any page", cases.len()))
}

// 7 -----------------------------------------------------------------------

fn personalization() -> Verdict {
    let store = load_store(&fixture_project().join("content")).map_err(|e| e.to_string())?;
    let ctx = |src: &str| parse_context(src).unwrap();
    let text = |s: &str| Value::Text(s.into());
    let markup = |s: &str| Value::Markup(s.into());
    let worked = [
        ("greeting", ctx("p = registered"), text("Welcome back!")),
        ("greeting", ctx(""), text("Welcome, guest!")),
        ("promo", ctx("s.lang = en"), markup("<p>Read the news in English.</p>")),
        ("promo", ctx("p = registered\ns.lang = en"), markup("<p>Your English digest is ready.</p>")),
        ("promo", ctx("p = registered"), markup("<p>Sign up for the digest.</p>")),
        ("promo", ctx("s.lang = de"), markup("<p>Sign up for the digest.</p>")),
    ];
    for (path, c, want) in &worked {
        let got = resolve_variant(store.get(path).unwrap(), c).map_err(|e| e.to_string())?;
        ensure(got == *want, || format!("{path} under {:?}: got {got}", c.canonical()))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let statuses = ["anonymous", "registered", "guest"];
    for _ in 0..PERSONALIZATION_TRIALS {
        let mut base = PersonalizationContext::with_status(statuses[rng.random_range(0..3)]);
        if rng.random_bool(0.6) {
            base.prefs.insert("lang".into(), ["en", "de"][rng.random_range(0..2)].into());
        }
        for obj in store.iter() {
            let relevant: BTreeSet<String> = obj.variants.iter().flat_map(|(g, _)| g.keys()).collect();
            let before = obj.resolve(&base).ok().cloned();
            let mut changed = base.clone();
            for _ in 0..rng.random_range(1..4) {
                let key = format!("k{}", rng.random_range(0..5));
                let value = format!("{}", rng.random_range(0..3));
                match rng.random_range(0..4) {
                    0 if !relevant.contains(&format!("s.{key}")) => changed.prefs.insert(key, value),
                    1 if !relevant.contains(&format!("v.{key}")) => changed.client.insert(key, value),
                    2 if !relevant.contains(&format!("e.{key}")) => changed.device.insert(key, value),
                    3 if !relevant.contains("p") => Some(std::mem::replace(&mut changed.status, value)),
                    _ => None,
                };
            }
            let after = obj.resolve(&changed).ok().cloned();
            ensure(before == after, || {
                format!("{}: irrelevant keys changed the selection ({:?} -> {:?})", obj.path, base.canonical(), changed.canonical())
            })?;
        }
    }
    Ok(format!("{} worked cases resolve to the expected variant; {PERSONALIZATION_TRIALS} randomized irrelevant-key trials stable", worked.len()))
}

// 8 -----------------------------------------------------------------------

fn tricky_store() -> ContentStore {
    use amcm::templating::parse_content;
    [
        ("quotes/1st", "type: Text\n---\nsay \"hi\"\\ now\ttab"),
        ("raw", "type: Markup\n---\n<p>>>> not a terminator</p>"),
        ("ends/gt", "type: Markup\n---\n<br>"),
        ("flags/on", "type: Bool\n---\ntrue"),
        ("neg", "type: Int\n---\n-42"),
        ("people", "type: Record{name: Text, age: Int}\n---\nname: Ann\nage: 40"),
        ("empty/list", "type: List<Int>\n---\n"),
    ]
    .iter()
    .map(|(p, s)| parse_content(p, s).unwrap())
    .collect::<Result<ContentStore, _>>()
    .unwrap()
}

fn check_load_round_trip(store: &ContentStore, ctx: &PersonalizationContext) -> Result<(), String> {
    let program = emit_load_program(store, ctx).map_err(|e| e.to_string())?;
    let printed = program.to_string();
    let reparsed = parse_program_source(&printed).map_err(|e| format!("emitted program does not parse: {e}"))?;
    ensure(reparsed == program, || "re-parsed program differs".into())?;
    let state = run(&reparsed, [], &Env::new(store, ctx)).map_err(|e| e.to_string())?;
    ensure(state.memory.len() == store.len(), || format!("{} bindings for {} objects", state.memory.len(), store.len()))?;
    for obj in store.iter() {
        let ident = mangle(&obj.path).ok_or("unmangleable path")?;
        let want = resolve_variant(obj, ctx).map_err(|e| e.to_string())?;
        ensure(state.memory.get(&ident) == Some(&want), || format!("`{ident}` does not hold the payload of `{}`", obj.path))?;
    }
    ensure(state.output.is_empty() && state == MachineState { memory: state.memory.clone(), ..MachineState::default() }, || {
        "load program touched input or output".into()
    })
}

fn translator_round_trip() -> Verdict {
    let project = fixture_project();
    let project_store = load_store(&project.join("content")).map_err(|e| e.to_string())?;
    let contexts: Vec<PersonalizationContext> = ["", "p = registered\ns.lang = en", "s.lang = en"]
        .iter()
        .map(|s| parse_context(s).unwrap())
        .collect();
    let stores = [("project", project_store), ("fuzz", fuzz_store()), ("tricky", tricky_store()), ("empty", ContentStore::default())];
    let mut runs = 0;
    for (name, store) in &stores {
        for ctx in &contexts {
            check_load_round_trip(store, ctx).map_err(|e| format!("{name} store: {e}"))?;
            runs += 1;
        }
    }

    let model = parse_model(&std::fs::read_to_string(project.join("models/site.cdm")).unwrap()).map_err(|e| e.to_string())?;
    let ddl = translate_ddl(&model).map_err(|e| e.to_string())?.to_string();
    let doc = parse_ddl(&ddl)?;
    doc.validate()?;
    ensure(doc.to_string() == ddl, || "DDL does not re-print identically".into())?;
    let golden = std::fs::read_to_string(project.join("golden/site.sql")).map_err(|e| e.to_string())?;
    ensure(ddl == golden, || "DDL differs from golden/site.sql".into())?;
    Ok(format!(
        "{runs} store/context load round-trips exact; DDL ({} tables) re-parses, validates and matches golden bytes",
        doc.tables.len()
    ))
}

// 9 -----------------------------------------------------------------------

fn cli_contract() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let conf = copy_project(dir.path());
    let root = dir.path();
    let out_dir = root.join("out");
    let code = |o: &Output| o.status.code().unwrap_or(-1);
    let stderr = |o: &Output| String::from_utf8_lossy(&o.stderr).to_string();
    let stdout = |o: &Output| String::from_utf8_lossy(&o.stdout).to_string();
    let mut rows = 0;
    let mut expect = |what: &str, o: &Output, want: i32| {
        rows += 1;
        ensure(code(o) == want, || format!("{what}: exit {} (want {want}); stderr: {}", code(o), stderr(o)))
    };

    // ok paths
    let o = amcm(&conf, &["check", "models/site.cdm"]);
    expect("check valid", &o, 0)?;
    ensure(stdout(&o).contains("0 errors"), || "check output lacks `0 errors`".into())?;
    let o = amcm(&conf, &["render", "page"]);
    expect("render anonymous", &o, 0)?;
    let golden = |name: &str| std::fs::read(fixture_project().join("golden").join(name)).unwrap();
    ensure(std::fs::read(out_dir.join("page.html")).unwrap() == golden("page.anonymous.html"), || {
        "anonymous page differs from golden".into()
    })?;
    let o = amcm(&conf, &["render", "page", "--context", "contexts/registered.ctx", "--trace"]);
    expect("render registered", &o, 0)?;
    ensure(std::fs::read(out_dir.join("page.html")).unwrap() == golden("page.registered.html"), || {
        "registered page differs from golden".into()
    })?;
    ensure(out_dir.join("page.trace").is_file(), || "--trace wrote no trace".into())?;
    let o = amcm(&conf, &["translate", "models/site.cdm", "--ddl", "out/site.sql", "--load", "out/load.amp"]);
    expect("translate", &o, 0)?;
    ensure(std::fs::read(out_dir.join("site.sql")).unwrap() == golden("site.sql"), || "DDL differs from golden".into())?;
    let load = std::fs::read_to_string(out_dir.join("load.amp")).unwrap();
    parse_program_source(&load).map_err(|e| format!("load program does not parse: {e}"))?;

    // usage / io
    expect("no arguments", &amcm(&conf, &[]), 1)?;
    expect("unknown command", &amcm(&conf, &["publish"]), 1)?;
    let o = amcm(&conf, &["check", "models/nope.cdm"]);
    expect("unreadable model", &o, 1)?;
    ensure(stderr(&o).contains("nope.cdm"), || "missing file not named".into())?;
    expect("unknown template", &amcm(&conf, &["render", "sidebar"]), 1)?;

    // integrity / parse
    let o = amcm(&conf, &["check", "models/incomplete.cdm"]);
    expect("incomplete model", &o, 2)?;
    let error_lines = stdout(&o).lines().filter(|l| l.starts_with("error ")).count();
    ensure(error_lines == 1, || format!("{error_lines} error lines for one completeness error"))?;
    expect("unstratified model", &amcm(&conf, &["check", "models/unstratified.cdm"]), 2)?;
    expect("model syntax error", &amcm(&conf, &["check", "models/broken.cdm"]), 2)?;
    let o = amcm(&conf, &["translate", "models/incomplete.cdm", "--ddl", "out/bad.sql", "--load", "out/bad.amp"]);
    expect("translate failing model", &o, 2)?;
    ensure(!out_dir.join("bad.sql").exists() && !out_dir.join("bad.amp").exists(), || {
        "failed translate wrote files".into()
    })?;

    // machine error: the previous page must survive untouched
    let before = std::fs::read(out_dir.join("page.html")).unwrap();
    std::fs::write(root.join("bindings/page.amp"), "bind \"page\" {\n    title = 3;\n}\n").unwrap();
    let o = amcm(&conf, &["render", "page"]);
    expect("wrong-typed slot", &o, 3)?;
    let msg = stderr(&o);
    ensure(msg.contains("TypeIncompatibility") && msg.contains("title") && msg.contains("2:5"), || {
        format!("machine error message lacks kind, identifier or position: {msg}")
    })?;
    ensure(std::fs::read(out_dir.join("page.html")).unwrap() == before, || "failed render touched the page".into())?;

    // induced write failure: the target path is a directory
    std::fs::copy(fixture_project().join("bindings/page.amp"), root.join("bindings/page.amp")).unwrap();
    std::fs::remove_file(out_dir.join("page.html")).unwrap();
    std::fs::create_dir(out_dir.join("page.html")).unwrap();
    let listing = |d: &Path| -> BTreeSet<String> {
        std::fs::read_dir(d).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().to_string()).collect()
    };
    let files_before = listing(&out_dir);
    let o = amcm(&conf, &["render", "page"]);
    expect("unwritable output", &o, 1)?;
    ensure(listing(&out_dir) == files_before, || format!("stray files after failed write: {:?}", listing(&out_dir)))?;
    ensure(listing(&out_dir.join("page.html")).is_empty(), || "partial output inside target".into())?;

    Ok(format!("{rows} exit-code cases (0/1/2/3) as contracted; no partial or stray files after induced failures"))
}
