mod common;

use fbmimo_core::numerics::ComplexMatrix;
use fbmimo_core::precoder::{zf_beamformers, CsiSource};
use fbmimo_core::quantizer::generate_codebook;
use fbmimo_core::simulate::mu_trial;
use fbmimo_core::stats::{ks_one_sample, ks_two_sample};
use fbmimo_core::{Csit, RngStream, ScalingPolicy, SimConfig};
use rand::Rng;
use rand_distr::{Distribution, Gamma};

#[test]
fn perfect_zf_beam_gain_is_beta() {
    // v_i is isotropic and independent of h_i, so |h̃_i† v_i|² ~ Beta(1, M-1)
    let m = 5;
    let mut x = Vec::new();
    for t in 0..4000u64 {
        let mut rng = RngStream::new(31, t);
        let h: Vec<_> = (0..m).map(|_| common::cn_vector(m, &mut rng)).collect();
        let bf = zf_beamformers(&ComplexMatrix::from_adjoint_rows(&h).unwrap(), CsiSource::PerfectCsit).unwrap();
        x.push(h[0].normalized().unwrap().inner(&bf.vectors[0]).norm_sqr());
    }
    let ks = ks_one_sample(&x, |v| 1.0 - (1.0 - v).powi(m as i32 - 1));
    assert!(ks.passes(0.01), "{ks:?}");
}

#[test]
fn interference_never_exceeds_quantization_error() {
    for (m, b) in [(3usize, 2u32), (4, 6), (6, 4)] {
        for t in 0..500u64 {
            let mut rng = RngStream::new(41, t);
            let h: Vec<_> = (0..m).map(|_| common::cn_vector(m, &mut rng)).collect();
            let q: Vec<_> = h.iter().map(|hi| generate_codebook(m, b, &mut rng).unwrap().quantize(hi).unwrap()).collect();
            let est: Vec<_> = q.iter().map(|o| o.direction.clone()).collect();
            let Ok(bf) = zf_beamformers(&ComplexMatrix::from_adjoint_rows(&est).unwrap(), CsiSource::Quantized) else {
                continue;
            };
            for i in 0..m {
                let d = h[i].normalized().unwrap();
                for j in (0..m).filter(|&j| j != i) {
                    assert!(d.inner(&bf.vectors[j]).norm_sqr() <= q[i].error + 1e-10);
                }
            }
        }
    }
}

#[test]
fn perfect_zf_rate_law() {
    // per-user rate of perfect-CSIT ZF is log2(1 + (P/M) · Gamma(M,1) · Beta(1,M-1))
    let (m, snr) = (4usize, 10.0);
    let p = 10f64.powf(snr / 10.0);
    let cfg = SimConfig::multiuser(m, ScalingPolicy::fixed(0), vec![snr]).with_csit(Csit::Perfect);
    let engine: Vec<f64> = (0..5000).map(|t| (1.0 + mu_trial(&cfg, snr, t).unwrap().sinr[0]).log2()).collect();
    let mut rng = RngStream::new(51, 0);
    let gamma = Gamma::new(m as f64, 1.0).unwrap();
    let product: Vec<f64> = (0..5000)
        .map(|_| {
            let g: f64 = gamma.sample(&mut rng);
            (1.0 + p / m as f64 * g * common::beta1(m as f64 - 1.0, rng.random())).log2()
        })
        .collect();
    let ks = ks_two_sample(&engine, &product);
    assert!(ks.passes(0.01), "{ks:?}");
}
