use proptest::collection::vec;
use proptest::prelude::*;
use qcartier_core::{Integers, LocalizedRationals, MulKernel, Residues, Ring, Series, WideResidues};

fn series<R: Ring>(ring: R, lowest: i64, vals: &[i64], extra: usize) -> Series<R> {
    Series::from_i64s(ring, lowest, vals, lowest + (vals.len() + extra) as i64).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    vec(-1000i64..1000, 1..24)
}

macro_rules! ring_axioms {
    ($name:ident, $ring:expr) => {
        proptest! {
            #[test]
            fn $name(a in coeffs(), b in coeffs(), c in coeffs(), la in -2i64..3, lb in -2i64..3) {
                let ring = $ring;
                let (x, y, z) = (series(ring.clone(), la, &a, 0), series(ring.clone(), lb, &b, 2), series(ring.clone(), 0, &c, 1));
                prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
                prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
                prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
                prop_assert_eq!(
                    x.mul(&y.add(&z).unwrap()).unwrap(),
                    x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
                );
                let one = Series::one(ring.clone(), 64);
                prop_assert_eq!(x.mul(&one).unwrap(), x.clone());
                prop_assert!(x.sub(&x).unwrap().is_zero());
            }
        }
    };
}

ring_axioms!(integer_series_form_a_ring, Integers);
ring_axioms!(localized_series_form_a_ring, LocalizedRationals::new(5).unwrap());
ring_axioms!(residue_series_form_a_ring, Residues::new(7, 6).unwrap());
ring_axioms!(wide_residue_series_form_a_ring, WideResidues::new(5, 40).unwrap());

proptest! {
    /// Coefficients past the declared precision must never leak into a product.
    #[test]
    fn products_are_honest_about_precision(a in coeffs(), b in coeffs(), tail_a in coeffs(), tail_b in coeffs()) {
        let x = series(Integers, 0, &a, 0);
        let y = series(Integers, 1, &b, 0);
        let xx = series(Integers, 0, &[a.clone(), tail_a].concat(), 0);
        let yy = series(Integers, 1, &[b.clone(), tail_b].concat(), 0);
        let prod = x.mul(&y).unwrap();
        // leading zeros are absorbed into the order, which can only raise the bound
        prop_assert!(prod.precision() >= (x.precision() + 1).min(y.precision()));
        let extended = xx.mul(&yy).unwrap();
        prop_assert!(extended.precision() >= prod.precision());
        prop_assert_eq!(extended.truncated(prod.precision()), prod);
    }

    #[test]
    fn karatsuba_agrees_with_schoolbook(a in vec(0u64..117649, 1..300), b in vec(0u64..117649, 1..300)) {
        let ring = Residues::new(7, 6).unwrap();
        let n = a.len().min(b.len()) as i64;
        let x = Series::from_fn(ring, 0, n, |k| a[k as usize]).unwrap();
        let y = Series::from_fn(ring, 0, n, |k| b[k as usize]).unwrap();
        prop_assert_eq!(x.mul_with(&y, MulKernel::Schoolbook).unwrap(), x.mul_with(&y, MulKernel::Karatsuba).unwrap());
    }

    #[test]
    fn inverse_is_two_sided(a in coeffs()) {
        let ring = LocalizedRationals::new(7).unwrap();
        let mut a = a;
        a[0] = 1 + 7 * a[0];
        let x = series(ring, 0, &a, 0);
        let one = Series::one(ring, x.precision());
        prop_assert_eq!(x.mul(&x.invert().unwrap()).unwrap(), one);
    }

    #[test]
    fn log_and_exp_are_inverse(a in vec(-500i64..500, 1..20), p in prop::sample::select(vec![5u64, 7, 11])) {
        let ring = Residues::new(p, 8).unwrap();
        // 1 + p q f(q)
        let mut vals = vec![1];
        vals.extend(a.iter().map(|c| c * p as i64));
        let x = series(ring, 0, &vals, 0);
        let back = x.log1p_to(4).unwrap().exp_to(4).unwrap();
        prop_assert_eq!(back.first_incongruence(&x.coarsen(back.ring()).unwrap(), 4).unwrap(), None);
    }

    #[test]
    fn reduction_is_a_ring_map(a in coeffs(), b in coeffs()) {
        let target = Residues::new(5, 3).unwrap();
        let ring = LocalizedRationals::new(5).unwrap();
        let (x, y) = (series(ring, 0, &a, 0), series(ring, 0, &b, 0));
        let lhs = x.mul(&y).unwrap().reduce_into(&target).unwrap();
        let rhs = x.reduce_into(&target).unwrap().mul(&y.reduce_into(&target).unwrap()).unwrap();
        // a product of vanishing reductions may know more terms than the reduction of the product
        let n = lhs.precision().min(rhs.precision());
        prop_assert_eq!(lhs.truncated(n), rhs.truncated(n));
    }
}
