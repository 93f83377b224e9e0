//! parse ∘ print is the identity on canonical-form expression trees.

use proptest::prelude::*;

use grstar::expr::{eval, parse, print, Expr};
use grstar_core::ncpoly::Context;
use grstar_core::scalars::rat;

fn ast_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0i64..=9, 1i64..=9).prop_map(|(p, q)| Expr::Literal(rat(p, q))),
        (1u8..=2).prop_map(Expr::Letter),
        Just(Expr::Cup),
        (-2i64..=4).prop_map(Expr::CupPow),
        (1u8..=2).prop_map(Expr::ZOf),
    ];
    leaf.prop_recursive(4, 40, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Star(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Bullet(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sum(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Diff(a.into(), b.into())),
            inner.clone().prop_map(|a| Expr::Involution(a.into())),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn print_then_parse_is_identity(ast in ast_strategy()) {
        let text = print(&ast);
        let back = parse(&text, 2).unwrap();
        prop_assert_eq!(&back, &ast, "printed: {}", text);
    }

    #[test]
    fn printed_expressions_evaluate_identically(ast in ast_strategy()) {
        let ctx = Context::new(2);
        let direct = eval(&ast, &ctx).unwrap();
        let reparsed = eval(&parse(&print(&ast), 2).unwrap(), &ctx).unwrap();
        prop_assert_eq!(direct, reparsed);
    }
}
