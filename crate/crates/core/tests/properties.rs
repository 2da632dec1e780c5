use proptest::prelude::*;

use msd::calculus::{handle_slide, Band};
use msd::equivalence::{compose, isomorphic, verify_witness, EquivOptions};
use msd::invariants::{homology, linking_matrix};
use msd::io::{moves, parse, serialize};
use msd::random::{perturb, random_link, random_multi_piece, relabel, rng};
use msd::reduction::reduce;
use msd::Verdict;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn text_round_trip(seed in any::<u64>(), multi in any::<bool>()) {
        let mut r = rng(seed);
        let d = if multi { random_multi_piece(&mut r, 4) } else { random_link(&mut r, 8, 4) };
        let s = serialize(&d);
        let back = parse(&s).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(serialize(&back), s);
    }

    #[test]
    fn slides_keep_the_determinant(seed in any::<u64>(), rev in any::<bool>()) {
        let mut r = rng(seed);
        let d = random_link(&mut r, 8, 4);
        prop_assume!(d.circles.len() >= 2);
        let ids: Vec<_> = d.circles.keys().cloned().collect();
        let s = handle_slide(&d, &ids[0], &ids[1], &Band::simple(rev)).unwrap();
        let (a, b) = (linking_matrix(&d).unwrap(), linking_matrix(&s).unwrap());
        prop_assert_eq!(a.determinant().abs(), b.determinant().abs());
    }

    #[test]
    fn reduction_keeps_homology(seed in any::<u64>()) {
        let d = random_multi_piece(&mut rng(seed), 4);
        let red = reduce(&d).unwrap();
        prop_assert_eq!(homology(&red.diagram).unwrap(), homology(&d).unwrap());
        prop_assert!(red.diagram.pairs.is_empty());
    }

    #[test]
    fn relabeled_copies_are_isomorphic(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d1 = random_link(&mut r, 6, 3);
        let p = perturb(&mut r, &d1, 2);
        let d2 = relabel(&mut r, &p, true);
        let d3 = relabel(&mut r, &d2, true);
        let opts = EquivOptions::default();
        let (Verdict::Yes(f), Verdict::Yes(g)) = (isomorphic(&d1, &d2, &opts).unwrap(), isomorphic(&d2, &d3, &opts).unwrap()) else {
            return Err(TestCaseError::fail("not isomorphic"));
        };
        prop_assert!(verify_witness(&d1, &d2, &f).is_ok());
        let text = moves::format_witness(&f);
        prop_assert_eq!(moves::parse_witness(&text).unwrap(), f.clone());
        let h = compose(&f, &g).unwrap();
        prop_assert!(verify_witness(&d1, &d3, &h).is_ok());
    }
}
