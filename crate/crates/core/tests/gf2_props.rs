use nlets::gf2::{for_each_in_coset, pair_normalize, BitMatrix, BitVector, Echelon};
use proptest::prelude::*;

/// Matrix as rows of bools, up to 32×32.
fn dense() -> impl Strategy<Value = Vec<Vec<bool>>> {
    (1usize..=32, 1usize..=32)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(any::<bool>(), c), r))
}

fn to_matrix(a: &[Vec<bool>]) -> BitMatrix {
    let rows = a.iter().map(|r| BitVector::from_bools(r)).collect();
    BitMatrix::from_rows(a[0].len(), rows).unwrap()
}

/// Rank by textbook elimination on `Vec<Vec<bool>>`.
fn naive_rank(a: &[Vec<bool>]) -> usize {
    let mut m: Vec<Vec<bool>> = a.to_vec();
    let cols = m[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c]) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && m[r][c] {
                let pivot = m[rank].clone();
                for (x, y) in m[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn naive_mul(a: &[Vec<bool>], x: &BitVector) -> Vec<bool> {
    a.iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .fold(false, |acc, (j, &b)| acc ^ (b & x.get(j)))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rank_matches_naive(a in dense()) {
        prop_assert_eq!(to_matrix(&a).rank(), naive_rank(&a));
    }

    #[test]
    fn rank_plus_nullity(a in dense()) {
        let m = to_matrix(&a);
        let k = m.nullspace_basis();
        prop_assert_eq!(m.rank() + k.nrows(), m.ncols());
        prop_assert_eq!(k.rank(), k.nrows());
        for v in k.rows() {
            prop_assert!(naive_mul(&a, v).iter().all(|&b| !b));
        }
    }

    #[test]
    fn solve_agrees_with_column_space(a in dense(), seed in any::<u64>()) {
        let m = to_matrix(&a);
        let x0 = BitVector::from_bools(&(0..m.ncols()).map(|j| (seed >> (j % 64)) & 1 == 1).collect::<Vec<_>>());
        let b = BitVector::from_bools(&naive_mul(&a, &x0));
        let x = m.solve(&b).expect("b is in the column space");
        prop_assert_eq!(naive_mul(&a, &x), b.to_bools());
        // A right-hand side raising the rank of [A | b] has no solution.
        let flipped = BitVector::from_bools(&b.to_bools().iter().enumerate().map(|(i, &v)| v ^ (i == 0)).collect::<Vec<_>>());
        let mut aug: Vec<Vec<bool>> = a.clone();
        for (row, bit) in aug.iter_mut().zip(flipped.to_bools()) {
            row.push(bit);
        }
        let solvable = naive_rank(&aug) == naive_rank(&a);
        prop_assert_eq!(m.solve(&flipped).is_some(), solvable);
    }

    #[test]
    fn echelon_membership(a in dense(), probe in prop::collection::vec(any::<bool>(), 32)) {
        let m = to_matrix(&a);
        let e = Echelon::from_rows(m.ncols(), m.rows());
        prop_assert_eq!(e.rank(), naive_rank(&a));
        let v = BitVector::from_bools(&probe[..m.ncols()]);
        let mut with: Vec<Vec<bool>> = a.clone();
        with.push(v.to_bools());
        prop_assert_eq!(e.contains(&v), naive_rank(&with) == naive_rank(&a));
    }

    #[test]
    fn pair_normalize_gives_dual_pairs(k in 1usize..6, seed in any::<u64>()) {
        // Start from the standard dual pair on 2k bits and scramble both sides.
        let n = 2 * k;
        let xs: Vec<BitVector> = (0..k).map(|i| BitVector::unit(n, i)).collect();
        let zs: Vec<BitVector> = (0..k).map(|i| BitVector::unit(n, i)).collect();
        let mut s = seed;
        let mut next = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); s >> 33 };
        let mut mix = |v: &mut Vec<BitVector>| {
            for _ in 0..3 * k {
                let (i, j) = (next() as usize % k, next() as usize % k);
                if i != j {
                    let r = v[j].clone();
                    v[i].xor_assign(&r);
                }
            }
            for w in v.iter_mut() {
                w.set(k + next() as usize % k, true);
            }
        };
        let (mut xs, mut zs) = (xs, zs);
        mix(&mut xs);
        mix(&mut zs);
        // The high block pairs with nothing, so only the low block sets the pairing.
        let zs: Vec<BitVector> = zs.iter().map(|z| BitVector::from_bools(&z.to_bools().iter().enumerate().map(|(i, &b)| b && i < k).collect::<Vec<_>>())).collect();
        let (px, pz) = pair_normalize(&xs, &zs).unwrap();
        for (i, x) in px.iter().enumerate() {
            for (j, z) in pz.iter().enumerate() {
                prop_assert_eq!(x.dot(z), i == j);
            }
        }
        prop_assert_eq!(Echelon::from_rows(n, &px).rank(), Echelon::from_rows(n, &xs).rank());
        let mut both = Echelon::from_rows(n, &xs);
        prop_assert!(px.iter().all(|x| !both.insert(x)));
    }
}

#[test]
fn coset_enumeration_is_exact() {
    let basis = vec![
        BitVector::parse01("1100").unwrap(),
        BitVector::parse01("0110").unwrap(),
        BitVector::parse01("1010").unwrap(),
    ];
    let offset = BitVector::parse01("0001").unwrap();
    let mut seen = Vec::new();
    let count = for_each_in_coset(&basis, &offset, 1 << 10, |v| seen.push(v.to_u64())).unwrap();
    seen.sort_unstable();
    assert_eq!(count, 4);
    // offset + span{1100, 0110}, with bit i of the string at position i.
    let mut expect: Vec<u64> = ["0001", "1101", "0111", "1011"]
        .iter()
        .map(|s| BitVector::parse01(s).unwrap().to_u64())
        .collect();
    expect.sort_unstable();
    assert_eq!(seen, expect);
}
