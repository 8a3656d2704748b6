use pitensor::banach::NormedSpace;
use pitensor::linalg::Mat;
use pitensor::projnorm::*;
use pitensor::tensor::*;
use pitensor::attain::*;
use pitensor::SolverConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let x = NormedSpace::<f64>::l2(5);
    let y = NormedSpace::<f64>::l2(3);
    let mut rng = ChaCha8Rng::seed_from_u64(1100);
    let m = Mat::from_fn(5, 3, |_, _| rng.gen_range(-1.0..=1.0));
    let t = Tensor::new(x.clone(), y.clone(), m).unwrap();
    let cfg = SolverConfig::default();
    let r = proj_norm_colgen(&t, &cfg).unwrap();
    println!("upper={} lower={} gap={} iters={}", r.upper, r.lower, r.gap(), r.iterations.len());
    for it in &r.iterations {
        println!("  iter {} master {} priced {} pool {}", it.iter, it.master_value, it.priced_value, it.pool_size);
    }
    let cert = certify_attainment(&t, &r.decomposition, &r.dual, 1e-6, &cfg).unwrap();
    println!("verdict {:?} residual {:.3e} opnorm {:.12} ({:?})", cert.verdict, cert.residual, cert.op_norm.value, cert.op_norm.status);
    let worst = cert.pairings.iter().map(|p| (p-1.0).abs()).fold(0.0f64, f64::max);
    println!("worst pairing dev {:.3e}, atoms {}", worst, r.decomposition.len());
    let gz = pairing(&r.dual, &t).unwrap();
    println!("value {} gz {} |v-gz| {:.3e}", r.decomposition.value(), gz, (r.decomposition.value()-gz).abs());
}
