use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Probes per substream for chunked Monte Carlo work.
pub(crate) const CHUNK: usize = 1 << 14;

/// Independent substream `stream` of the generator seeded with `seed`. Work
/// split over substreams gives the same result for any thread count.
pub(crate) fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` uniform points in the box `[lo, hi]`, row-major. Generated in
/// substream chunks so the output does not depend on the thread count.
pub(crate) fn uniform_box(lo: &[f64], hi: &[f64], n: usize, seed: u64) -> Vec<f64> {
    use rand::Rng;
    use rayon::prelude::*;

    let d = lo.len();
    let mut out = vec![0.0; n * d];
    out.par_chunks_mut(CHUNK * d.max(1)).enumerate().for_each(|(c, buf)| {
        let mut rng = substream(seed, c as u64);
        for p in buf.chunks_exact_mut(d) {
            for a in 0..d {
                p[a] = lo[a] + (hi[a] - lo[a]) * rng.gen::<f64>();
            }
        }
    });
    out
}
