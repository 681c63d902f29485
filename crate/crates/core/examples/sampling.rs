//! Polymer-chain sampling of random cluster configurations and Potts
//! colourings, checked against the exact distribution.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rcx::dynamics::total_variation;
use rcx::engine::{CountOptions, RcSampler, SamplerOptions};
use rcx::exact::rc_distribution;
use rcx::Graph;

fn main() -> rcx::Result<()> {
    let g = Graph::cycle(4);
    let (q, beta) = (100.0, 3.0);
    let opts = SamplerOptions {
        count: CountOptions { m: Some(5), force: true, ..CountOptions::default() },
        polymer_size: Some(4),
        ..SamplerOptions::default()
    };
    let sampler = RcSampler::new(&g, q, beta, 0.4, &opts)?;
    println!("P(disordered phase) = {:.4}", sampler.p_dis());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draws = 50_000;
    let mut hist = vec![0.0; 16];
    for _ in 0..draws {
        hist[sampler.sample(&mut rng).to_mask().unwrap() as usize] += 1.0 / draws as f64;
    }
    let exact = rc_distribution(&g, q, beta)?;
    println!("TV to exact law over {draws} samples: {:.4}", total_variation(&hist, &exact));
    println!("a Potts colouring with q=100: {:?}", sampler.sample_potts(100, &mut rng));
    Ok(())
}
