use sparse_series::sieve::{sieve, ArithFunction};

fn phi(n: u64) -> u64 {
    let (mut m, mut r, mut p) = (n, n, 2);
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            r -= r / p;
        }
        p += 1;
    }
    if m > 1 {
        r -= r / m;
    }
    r
}

#[test]
fn phi_lower_bound_at_one_million() {
    let x = 1_000_000;
    let t = sieve(ArithFunction::Phi, x).unwrap();
    let r = t.phi_lower_bound_check(x).unwrap();
    let (argmin, min) = (3..x)
        .map(|n| (n, phi(n) as f64 * (n as f64).ln().ln() / n as f64))
        .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
    assert_eq!(r.argmin, argmin);
    assert_eq!(argmin, 3);
    let d = r.min.to_decimal();
    let (lo, hi): (f64, f64) = (d.lo.parse().unwrap(), d.hi.parse().unwrap());
    assert!(lo <= min + 1e-12 && min - 1e-12 <= hi, "{d:?} vs {min}");
    assert!((min - 0.0627).abs() < 1e-3);
}
