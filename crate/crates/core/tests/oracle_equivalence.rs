use stringtop::loops::hochschild;
use stringtop::model_io::{parse_model, preset};
use stringtop::oracle::{delta_squared_is_zero, hochschild_dims_bruteforce};
use stringtop::Error;

fn agree(name: &str, a: &stringtop::DGAlgebra, window: (i32, i32)) {
    for dual in [false, true] {
        let brute = hochschild_dims_bruteforce(a, window, dual).unwrap();
        let (_, t) = hochschild(a, window, dual, None).unwrap();
        assert_eq!(brute.dims, t.dims(), "{name} dual={dual}");
    }
}

#[test]
fn presets_agree() {
    for (name, top) in [("sphere:2", 2), ("sphere:3", 3), ("cpn:1", 2), ("cpn:2", 4), ("sphere:6", 6)] {
        agree(name, &preset(name).unwrap(), (-6, top));
    }
}

#[test]
fn product_agrees() {
    agree("s2×s3", &preset("product(sphere:2,sphere:3)").unwrap(), (-6, 5));
}

#[test]
fn models_with_differential_agree() {
    let fat = parse_model("model fat { basis: 1:0, v:2, u:3, w:4; unit: 1; diff: u -> w; mult: v*v = w; }").unwrap();
    agree("fat", &fat, (-6, 4));
    let pair = parse_model("model pair { basis: 1:0, a:3, b:4, v:5; unit: 1; diff: a -> b; }").unwrap();
    agree("pair", &pair, (-5, 5));
}

#[test]
fn bar_differential_squares_to_zero() {
    let fat = parse_model("model fat { basis: 1:0, v:2, u:3, w:4; unit: 1; diff: u -> w; mult: v*v = w; }").unwrap();
    for dual in [false, true] {
        assert!(delta_squared_is_zero(&fat, (-5, 4), dual).unwrap());
    }
}

#[test]
fn rejects_degree_one() {
    let a = parse_model("model t { basis: 1:0, e:1; unit: 1; }").unwrap();
    assert!(matches!(hochschild_dims_bruteforce(&a, (0, 1), false), Err(Error::NotSimplyConnected(_))));
}

#[test]
fn budget_is_reported() {
    let a = preset("product(cpn:2,product(sphere:2,sphere:2))").unwrap();
    match hochschild_dims_bruteforce(&a, (-40, 0), false) {
        Err(Error::Budget(msg)) => assert!(msg.contains("arity bound")),
        other => panic!("expected a budget error, got {other:?}"),
    }
}
