//! Steps a single cell on a short input sequence and prints its output.

use enu::{EnuDims, EnuParams, EnuState, Noise};

fn main() -> enu::Result<()> {
    let dims = EnuDims::new(8, 2, 1)?;
    let params = EnuParams::<f64>::init(dims, 7, 0.5);
    let mut state = EnuState::zeros(dims);
    for t in 0..12 {
        let x = [if t % 4 == 0 { 1.0 } else { 0.0 }];
        let (next, out) = params.step(&state, &x, &mut Noise::Off)?;
        println!("t={t:2} x={:.0} out=[{:.4}, {:.4}] |h|={:.4}", x[0], out[0], out[1], norm(&next.h));
        state = next;
    }
    Ok(())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}
