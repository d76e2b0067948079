//! Long-running internal consistency checks; run with
//! `cargo test --test long -- --ignored`.

use std::collections::HashMap;

use num::BigUint;

use stsrank::components::enumerate_sts_with_prefix;
use stsrank::counting::factorial;
use stsrank::designs::TripleSystem;
use stsrank::iso::{automorphism_group, canonical_form};

/// Every system on 13 points decomposes as a choice of the 6 blocks through
/// point 0 (a perfect matching on the other 12 points, 10395 of them) times a
/// completion, and point-0 relabeling acts freely on the matchings. So the
/// full labeled count is 10395 times the count with a fixed star, and the
/// labeled count must also match the orbit-stabilizer sum over the canonical
/// classes found among the star-fixed systems.
#[test]
#[ignore = "~40 min on one core: full star-fixed enumeration of the 13-point systems"]
fn thirteen_point_census_is_internally_consistent() {
    let star = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [0, 7, 8], [0, 9, 10], [0, 11, 12]];
    let mut classes: HashMap<TripleSystem, u64> = HashMap::new();
    let count = enumerate_sts_with_prefix(13, &star, |d| {
        *classes.entry(canonical_form(d).unwrap()).or_insert(0) += 1;
    })
    .unwrap();
    assert_eq!(count, 115_200);
    assert_eq!(count * 10_395, 1_197_504_000);

    // Two isomorphism classes, with automorphism groups of order 39 and 6;
    // orbit-stabilizer turns that into the labeled count.
    assert_eq!(classes.len(), 2);
    let mut orders: Vec<BigUint> =
        classes.keys().map(|c| automorphism_group(c).unwrap().order).collect();
    orders.sort();
    assert_eq!(orders, vec![BigUint::from(6u32), BigUint::from(39u32)]);
    let labeled: BigUint = orders.iter().map(|a| factorial(13) / a).sum();
    assert_eq!(labeled, BigUint::from(1_197_504_000u64));
}
