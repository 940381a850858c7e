//! Advances many cell instances at once and checks them against a per-instance loop.

use std::time::Instant;

use enu::seed::stream;
use enu::{BatchWorkspace, EnuDims, EnuParams, EnuState, Noise, StateBatch};
use rand::Rng;

fn main() -> enu::Result<()> {
    let dims = EnuDims::new(32, 16, 32)?;
    let params = EnuParams::<f64>::init(dims, 1, 0.1);
    let batch_size = 256;
    let mut rng = stream(2, &[]);

    let mut batch = StateBatch::zeros(dims, batch_size);
    let mut single = vec![EnuState::zeros(dims); batch_size];
    let mut ws = BatchWorkspace::default();
    let (mut t_batch, mut t_loop) = (0.0, 0.0);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let xs: Vec<f64> = (0..batch_size * dims.input()).map(|_| rng.random_range(0.0..1.0)).collect();
        let t = Instant::now();
        params.step_batch_in_place(&mut batch, &xs, &mut Noise::Off, &mut ws)?;
        t_batch += t.elapsed().as_secs_f64();
        let t = Instant::now();
        for (i, s) in single.iter_mut().enumerate() {
            *s = params.step(s, &xs[i * dims.input()..(i + 1) * dims.input()], &mut Noise::Off)?.0;
        }
        t_loop += t.elapsed().as_secs_f64();
        for (i, s) in single.iter().enumerate() {
            for (a, b) in batch.memory(i).iter().zip(&s.h) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    println!("{batch_size} instances x 50 steps");
    println!("batched {:.1} ms, loop {:.1} ms, max deviation {worst:.1e}", t_batch * 1e3, t_loop * 1e3);
    Ok(())
}
