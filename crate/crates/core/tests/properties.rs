use gzeck::{
    char_at, count_prefix, decompose, recompose, stream, Decomposition, QStream, SequenceTable,
};
use num_bigint::BigUint;
use proptest::prelude::*;

fn big_value() -> impl Strategy<Value = BigUint> {
    prop::collection::vec(any::<u32>(), 1..6).prop_map(BigUint::new)
}

proptest! {
    #[test]
    fn decomposition_round_trips(n in 2usize..8, value in big_value()) {
        let table = SequenceTable::new(n).unwrap();
        let d = decompose(&table, &value);
        prop_assert!(d.validate().is_ok());
        prop_assert_eq!(recompose(&table, &d).unwrap(), value);
    }

    #[test]
    fn prefix_counts_sum_to_length(n in 2usize..7, value in big_value()) {
        let table = SequenceTable::new(n).unwrap();
        prop_assert_eq!(count_prefix(&table, &value).total(), value);
    }

    #[test]
    fn counts_grow_by_the_letter_at_each_position(n in 2usize..6, pos in 1u64..u64::MAX) {
        let table = SequenceTable::new(n).unwrap();
        let before = count_prefix(&table, &BigUint::from(pos - 1));
        let after = count_prefix(&table, &BigUint::from(pos));
        let letter = char_at(&table, &BigUint::from(pos)).unwrap();
        for i in 1..=n {
            let step = if i == letter.index() as usize { 1u32 } else { 0 };
            prop_assert_eq!(after.get(i), &(before.get(i) + step));
        }
    }

    #[test]
    fn char_at_matches_stream(n in 2usize..6, pos in 1usize..20_000) {
        let table = SequenceTable::new(n).unwrap();
        let expected = stream(n).unwrap().nth(pos - 1).unwrap();
        prop_assert_eq!(char_at(&table, &BigUint::from(pos)).unwrap(), expected);
    }

    #[test]
    fn shifted_indices_break_validation(n in 3usize..6, value in 2u64..1_000_000) {
        let table = SequenceTable::new(n).unwrap();
        let d = decompose(&table, &BigUint::from(value));
        if d.len() >= 2 {
            let mut ix = d.indices.clone();
            ix[1] = ix[0] + n as i64 - 1;
            prop_assert!(recompose(&table, &Decomposition::new(n, ix)).is_err());
        }
    }

    #[test]
    fn q_values_keep_smallest_summand(n in 3usize..6, offset in 0i64..6, steps in 1usize..400) {
        let table = SequenceTable::new(n).unwrap();
        let k = n as i64 + offset;
        let mut prev = None;
        for q in QStream::new(&table, k).unwrap().take(steps) {
            prop_assert_eq!(decompose(&table, &q).smallest_summand_index(), Ok(k));
            if let Some(p) = prev {
                prop_assert!(q > p);
            }
            prev = Some(q);
        }
    }
}
