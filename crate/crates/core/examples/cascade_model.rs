//! Closed-form cascade probabilities and the entropy estimates built on them.

use mbchaos::theory::{cascade_wn, entropy_phenomenological, entropy_predicted, CascadeArgument, EntropyVariant};

fn main() {
    let (gamma, n_f) = (1.0, 8);
    println!("{:>5} {:>8} {:>8} {:>8} {:>8} {:>9} {:>9}", "Γt", "W0", "W1", "W2", "W3", "S exact", "S linear");
    for i in 0..=10 {
        let t = 0.5 * i as f64;
        let w: Vec<f64> = (0..4).map(|n| cascade_wn(gamma, t, n, CascadeArgument::Linear)).collect();
        println!(
            "{:>5.1} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>9.4} {:>9.4}",
            gamma * t,
            w[0],
            w[1],
            w[2],
            w[3],
            entropy_predicted(gamma, t, n_f, EntropyVariant::ExactCascade),
            entropy_predicted(gamma, t, n_f, EntropyVariant::Linear)
        );
    }
    let w0: Vec<f64> = (0..=5).map(|i| (-(i as f64)).exp()).collect();
    let s = entropy_phenomenological(&w0, 100.0);
    println!("\ntwo-component estimate with 100 states:");
    for (w, s) in w0.iter().zip(&s) {
        println!("  W0 = {w:.4} → S = {s:.4}");
    }
}
