use curve_koszul::curve::CurveModel;
use curve_koszul::field::Field;
use curve_koszul::poly::MPoly;
use std::time::Instant;

fn main() {
    let f = Field::prime(11).unwrap();
    let mut fp = MPoly::zero(3);
    fp.add_term(&f, vec![3, 1, 0], f.one());
    fp.add_term(&f, vec![0, 3, 1], f.one());
    fp.add_term(&f, vec![1, 0, 3], f.one());
    let k = CurveModel::plane_smooth(f, fp).unwrap();
    for e in 1..=4 {
        let t0 = Instant::now();
        let pts = k.enumerate_closed_points(e).unwrap();
        println!("deg<= {e}: {} closed points, {:?}", pts.len(), t0.elapsed());
    }
}
