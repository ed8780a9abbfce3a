//! Property tests over enumerated values, random relations and random
//! declarations.

mod common;

use common::*;
use gadtparam_core::completion::{complete_in, embed, fmap, map_completion};
use gadtparam_core::kernel::{
    all_tables, carrier, compose, enumerate_values, identity_table, type_of, CtorSig, DataDecl, Env, Term, TypeExpr,
};
use gadtparam_core::lifting::{cell_set_includes, LiftEngine, Mode};
use gadtparam_core::parser::{parse_decls, parse_fun, parse_rel, parse_term, parse_type};
use gadtparam_core::relations::{eq_rel, includes, product_rel, Rel, RelUniverse};
use proptest::prelude::*;
use proptest::sample::{select, Index};

fn values(env: &Env, decl: &str, index: TypeExpr, depth: usize) -> Vec<Term> {
    enumerate_values(env.require_decl(decl).unwrap(), &[index], depth, env).unwrap()
}

fn bool_rel(mask: u8, env: &Env) -> Rel {
    RelUniverse::new(&TypeExpr::Bool, &TypeExpr::Bool, env).unwrap().rel(mask as u64 & 0xf)
}

fn related(engine: &LiftEngine, rels: &[Rel], x: &Term, y: &Term) -> bool {
    engine.decide(rels, x, y).unwrap().is_related()
}

fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::Naive), Just(Mode::Completion)]
}

fn small_type() -> impl Strategy<Value = TypeExpr> {
    select(vec![TypeExpr::Unit, TypeExpr::Bool, bb()])
}

fn field_type(vars: Vec<String>, name: String) -> impl Strategy<Value = TypeExpr> {
    let mut leaves = vec![Just(TypeExpr::Bool).boxed(), Just(TypeExpr::Unit).boxed()];
    if !vars.is_empty() {
        leaves.push(select(vars).prop_map(TypeExpr::var).boxed());
    }
    let leaf = proptest::strategy::Union::new(leaves);
    leaf.prop_recursive(2, 6, 2, move |inner| {
        let name = name.clone();
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| TypeExpr::prod(l, r)),
            inner.prop_map(move |t| TypeExpr::app(name.clone(), vec![t])),
        ]
    })
}

fn ctor(i: usize) -> impl Strategy<Value = CtorSig> {
    (1usize..=2).prop_flat_map(move |nvars| {
        let vars: Vec<String> = (1..=nvars).map(|k| format!("a{k}")).collect();
        (
            prop::collection::vec(field_type(vars.clone(), "D".into()), 0..3),
            field_type(vars.clone(), "D".into()),
        )
            .prop_map(move |(args, ret)| CtorSig {
                name: format!("k{i}"),
                quantified: vars.clone(),
                args,
                ret_instance: vec![ret],
            })
    })
}

fn decl() -> impl Strategy<Value = DataDecl> {
    (1usize..=3).prop_flat_map(|n| {
        (0..n)
            .map(ctor)
            .collect::<Vec<_>>()
            .prop_map(|ctors| DataDecl {
                name: "D".into(),
                arity: 1,
                ctors,
            })
    })
}

const TOKENS: &[&str] = &[
    "data", "Seq", "List", ":", "Set", "→", "->", "where", "∀", "forall", "{", "}", "(", ")", "[", "]", ",", "×", "*",
    "α", "x", "inj", "pairing", "nil", "cons", "true", "false", "unit", "not", "rel", "fun", "=>", "all", "except",
    "Bool", "Unit", "--", "\n", "term", "=",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_values_parse_back(i in any::<Index>(), depth in 1usize..=3) {
        let env = seq_env();
        let vs = values(&env, "Seq", bb(), depth);
        let v = i.get(&vs);
        prop_assert_eq!(&parse_term(&v.to_string(), &env).unwrap(), v);
    }

    #[test]
    fn printed_relations_and_tables_parse_back(mask in 0u64..1 << 16, i in any::<Index>()) {
        let env = seq_env();
        let r = RelUniverse::new(&bb(), &bb(), &env).unwrap().rel(mask);
        prop_assert_eq!(parse_rel(&r.to_string(), &env).unwrap(), r);
        let dom = carrier(&bb(), &env).unwrap();
        let tables = all_tables(&bb(), &bb(), &dom, &dom);
        let f = i.get(&tables);
        prop_assert_eq!(&parse_fun(&f.to_string(), &env).unwrap(), f);
    }

    #[test]
    fn printed_declarations_parse_back(d in decl()) {
        let text = d.to_string();
        let back = parse_decls(&text).unwrap_or_else(|e| panic!("{text}\n{e}"));
        prop_assert_eq!(back, vec![d]);
    }

    #[test]
    fn parser_never_panics(words in prop::collection::vec(select(TOKENS), 0..24), raw in "\\PC{0,40}") {
        let env = seq_env();
        for text in [words.join(" "), raw] {
            let _ = parse_decls(&text);
            let _ = parse_term(&text, &env);
            let _ = parse_rel(&text, &env);
            let _ = parse_fun(&text, &env);
            let _ = parse_type(&text, &env);
        }
    }

    #[test]
    fn relation_masks_are_a_bijection(a in 0u64..1 << 16, b in 0u64..1 << 16) {
        let env = seq_env();
        let u = RelUniverse::new(&bb(), &bb(), &env).unwrap();
        let (ra, rb) = (u.rel(a), u.rel(b));
        prop_assert_eq!(u.mask(&ra), Some(a));
        prop_assert_eq!(ra.len(), a.count_ones() as usize);
        prop_assert_eq!(includes(&ra, &rb), a & !b == 0);
        prop_assert_eq!(ra == rb, a == b);
    }

    #[test]
    fn products_factor_back(a in 1u8..16, b in 1u8..16) {
        let env = seq_env();
        let (r1, r2) = (bool_rel(a, &env), bool_rel(b, &env));
        let p = product_rel(&r1, &r2);
        prop_assert_eq!(p.len(), r1.len() * r2.len());
        let (f1, f2) = p.product_factors().unwrap();
        prop_assert_eq!((f1, f2), (r1, r2));
    }

    #[test]
    fn embedding_is_injective_and_well_typed(i in any::<Index>(), j in any::<Index>(), depth in 1usize..=2) {
        let env = seq_env();
        let (cd, cenv) = complete_in(&env, "Seq").unwrap();
        let vs = values(&env, "Seq", bb(), depth);
        let (x, y) = (i.get(&vs), j.get(&vs));
        let (ex, ey) = (embed(&cd, x, &cenv).unwrap(), embed(&cd, y, &cenv).unwrap());
        prop_assert_eq!(x == y, ex == ey);
        prop_assert_eq!(type_of(&ex, &cenv).unwrap(), TypeExpr::app(cd.completed.name(), vec![bb()]));
    }

    #[test]
    fn list_map_is_a_functor(i in any::<Index>(), f in any::<Index>(), g in any::<Index>()) {
        let env = list_env();
        let decl = env.require_decl("List").unwrap();
        let xs = values(&env, "List", bb(), 3);
        let x = i.get(&xs);
        let dom = carrier(&bb(), &env).unwrap();
        let tables = all_tables(&bb(), &bb(), &dom, &dom);
        let (f, g) = (f.get(&tables), g.get(&tables));
        let id = identity_table(&bb(), &env).unwrap();
        prop_assert_eq!(&fmap(decl, &[id], x, &env).unwrap(), x);
        let gf = compose(g, f).unwrap();
        let once = fmap(decl, &[gf], x, &env).unwrap();
        let twice = fmap(decl, &[g.clone()], &fmap(decl, &[f.clone()], x, &env).unwrap(), &env).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn completed_map_is_a_functor(i in any::<Index>(), f in any::<Index>(), g in any::<Index>()) {
        let env = seq_env();
        let (cd, cenv) = complete_in(&env, "Seq").unwrap();
        let vs = values(&env, "Seq", bb(), 2);
        let x = embed(&cd, i.get(&vs), &cenv).unwrap();
        let dom = carrier(&bb(), &env).unwrap();
        let tables = all_tables(&bb(), &bb(), &dom, &dom);
        let (f, g) = (f.get(&tables), g.get(&tables));
        let id = identity_table(&bb(), &env).unwrap();
        prop_assert_eq!(&map_completion(&cd, &[id], &x, &cenv).unwrap(), &x);
        let gf = compose(g, f).unwrap();
        let once = map_completion(&cd, &[gf], &x, &cenv).unwrap();
        let inner = map_completion(&cd, &[f.clone()], &x, &cenv).unwrap();
        let twice = map_completion(&cd, &[g.clone()], &inner, &cenv).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn equality_lifts_to_equality(
        list in any::<bool>(),
        m in mode(),
        ty in small_type(),
        i in any::<Index>(),
        j in any::<Index>(),
    ) {
        let (env, name) = if list { (list_env(), "List") } else { (seq_env(), "Seq") };
        let engine = LiftEngine::new(&env, name, m).unwrap();
        let vs = values(&env, name, ty.clone(), 2);
        let (x, y) = (i.get(&vs), j.get(&vs));
        let eq = eq_rel(&ty, &env).unwrap();
        prop_assert_eq!(related(&engine, &[eq.clone()], x, x), true);
        prop_assert_eq!(related(&engine, &[eq], x, y), x == y);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn completed_lifting_is_monotone(a in 0u64..1 << 16, b in 0u64..1 << 16) {
        let env = seq_env();
        let engine = LiftEngine::new(&env, "Seq", Mode::Completion).unwrap();
        let u = RelUniverse::new(&bb(), &bb(), &env).unwrap();
        let cells = engine.cells(&[bb()], &[bb()], 2).unwrap();
        let small = engine.relate_cells(&[u.rel(a & b)], &cells).unwrap();
        let big = engine.relate_cells(&[u.rel(a)], &cells).unwrap();
        prop_assert!(cell_set_includes(&small, &big));
    }

    #[test]
    fn list_lifting_is_monotone_in_both_modes(a in 0u8..16, b in 0u8..16, m in mode()) {
        let env = list_env();
        let engine = LiftEngine::new(&env, "List", m).unwrap();
        let cells = engine.cells(&[TypeExpr::Bool], &[TypeExpr::Bool], 3).unwrap();
        let small = engine.relate_cells(&[bool_rel(a & b, &env)], &cells).unwrap();
        let big = engine.relate_cells(&[bool_rel(a, &env)], &cells).unwrap();
        prop_assert!(cell_set_includes(&small, &big));
    }

    #[test]
    fn constructors_preserve_relatedness(
        m in mode(),
        a in 1u8..16,
        b in 1u8..16,
        picks in prop::array::uniform4(any::<Index>()),
    ) {
        let env = seq_env();
        let engine = LiftEngine::new(&env, "Seq", m).unwrap();
        let (r1, r2) = (bool_rel(a, &env), bool_rel(b, &env));
        let vs = values(&env, "Seq", TypeExpr::Bool, 2);
        let partner = |r: &Rel, x: &Term, k: &Index| -> Option<Term> {
            let ys: Vec<&Term> = vs.iter().filter(|y| related(&engine, &[r.clone()], x, y)).collect();
            (!ys.is_empty()).then(|| (*k.get(&ys)).clone())
        };
        let x1 = picks[0].get(&vs);
        let x2 = picks[1].get(&vs);
        if let (Some(y1), Some(y2)) = (partner(&r1, x1, &picks[2]), partner(&r2, x2, &picks[3])) {
            let pair = |l: &Term, r: &Term| {
                Term::con("pairing", vec![TypeExpr::Bool, TypeExpr::Bool], vec![l.clone(), r.clone()])
            };
            let p = product_rel(&r1, &r2);
            prop_assert!(related(&engine, &[p], &pair(x1, x2), &pair(&y1, &y2)));
        }
        for (u, v) in r1.pairs().iter() {
            let inj = |t: &Term| Term::con("inj", vec![TypeExpr::Bool], vec![t.clone()]);
            prop_assert!(related(&engine, &[r1.clone()], &inj(u), &inj(v)));
        }
    }

    #[test]
    fn cons_preserves_relatedness(m in mode(), a in 1u8..16, picks in prop::array::uniform3(any::<Index>())) {
        let env = list_env();
        let engine = LiftEngine::new(&env, "List", m).unwrap();
        let r = bool_rel(a, &env);
        let xs = values(&env, "List", TypeExpr::Bool, 2);
        let x = picks[0].get(&xs);
        let ys: Vec<&Term> = xs.iter().filter(|y| related(&engine, &[r.clone()], x, y)).collect();
        prop_assume!(!ys.is_empty());
        let y = picks[1].get(&ys);
        let heads: Vec<&(Term, Term)> = r.pairs().iter().collect();
        let (h1, h2) = picks[2].get(&heads);
        let cons = |h: &Term, t: &Term| Term::con("cons", vec![TypeExpr::Bool], vec![h.clone(), t.clone()]);
        prop_assert!(related(&engine, &[r.clone()], &cons(h1, x), &cons(h2, y)));
    }
}
