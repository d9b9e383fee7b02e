//! Prime-field arithmetic and distinct-coordinate evaluation vectors.
//!
//! ```bash
//! cargo run --example field_arithmetic
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twise::fields::{primes, FieldSpec};

fn main() {
    let f7 = FieldSpec::new(7).unwrap();
    println!("F_7: 3 + 5 = {}", f7.add(f7.element(3), f7.element(5)));
    println!("F_7: inv(3) = {}", f7.inv(f7.element(3)).unwrap());

    let f101 = FieldSpec::new(101).unwrap();
    println!("F_101: 2^100 = {}", f101.pow(f101.element(2), 100));

    // Composite moduli are rejected by the deterministic primality test.
    assert!(FieldSpec::new(91).is_err());
    println!("F_91 rejected: 91 = 7 * 13");

    // Seeded evaluation vectors are reproducible and repeat-free.
    let big = FieldSpec::new(primes::P61).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let alpha = big.sample_distinct_vector(8, &mut rng).unwrap();
    println!("8 distinct points of F_(2^61-1), seed 42:");
    for a in &alpha {
        println!("  {a}");
    }

    // Polynomial evaluation by Horner's rule: f(x) = 3 + 9x at x = 2.
    let msg = vec![f101.element(3), f101.element(9)];
    println!("F_101: (3 + 9x)(2) = {}", f101.eval_poly(&msg, f101.element(2)));
}
