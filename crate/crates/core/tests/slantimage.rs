use cipsar_core::medium::MediumProfile;
use cipsar_core::slantimage::*;

fn line(peak: f64, at: f64) -> MediumProfile {
    MediumProfile::from_fn(0.0, 1.0, 51, |x| 1.0 + (peak - 1.0) * (-((x - at) / 0.05).powi(2)).exp()).unwrap()
}

#[test]
fn unit_lines_give_unit_image() {
    let lines: Vec<MediumProfile> = (0..6).map(|_| MediumProfile::unity(0.0, 1.0, 51).unwrap()).collect();
    let img = assemble(&lines, 0.05, -1.67, 3.07).unwrap();
    assert!(img.values().iter().all(|&v| v == 1.0));
    let comp = postprocess(&img, (10, 20, 1, 3)).unwrap();
    assert!(comp.values().iter().all(|&v| v == 1.0));
}

#[test]
fn bump_stays_in_its_column() {
    let mut lines: Vec<MediumProfile> = (0..5).map(|_| MediumProfile::unity(0.0, 1.0, 51).unwrap()).collect();
    lines[2] = line(4.0, 0.5);
    let img = assemble(&lines, 0.05, 0.0, 1.0).unwrap();
    for s in 0..5 {
        let m = img.column(s).iter().fold(1.0f64, |a, &b| a.max(b));
        assert_eq!(m > 1.0, s == 2);
    }
}

#[test]
fn assemble_is_columnwise_concatenation() {
    let lines: Vec<MediumProfile> = (0..4).map(|s| line(2.0 + s as f64, 0.2 + 0.2 * s as f64)).collect();
    let img = assemble(&lines, 0.05, -1.67, 3.07).unwrap();
    let want: Vec<f64> = lines.iter().flat_map(|l| l.samples().to_vec()).collect();
    assert_eq!(img.values(), &want[..]);
    for (s, l) in lines.iter().enumerate() {
        let m = l.samples().iter().fold(1.0f64, |a, &b| a.max(b));
        assert_eq!(img.column(s).iter().fold(1.0f64, |a, &b| a.max(b)), m);
    }
    assert!((img.range(0) + 1.67).abs() < 1e-12);
    assert!((img.range(50) - (3.07 - 1.67)).abs() < 1e-12);
}

#[test]
fn grid_mismatch_is_rejected() {
    let lines = vec![MediumProfile::unity(0.0, 1.0, 51).unwrap(), MediumProfile::unity(0.0, 1.0, 41).unwrap()];
    assert!(assemble(&lines, 0.05, 0.0, 1.0).is_err());
}

#[test]
fn rectangle_is_flooded_with_its_maximum() {
    let mut v = vec![1.0; 8 * 10];
    v[3 * 10 + 4] = 23.9;
    let img = SlantRangeImage::new(v, 8, 10, 0.05, 0.0, 0.1).unwrap();
    let comp = postprocess(&img, (2, 6, 2, 5)).unwrap();
    for s in 0..8 {
        for l in 0..10 {
            let inside = (2..=6).contains(&l) && (2..=5).contains(&s);
            assert_eq!(comp.get(s, l), if inside { 23.9 } else { 1.0 });
        }
    }
}

#[test]
fn postprocess_is_idempotent_and_two_valued() {
    let lines: Vec<MediumProfile> = (0..6).map(|s| line(1.5 + s as f64, 0.3 + 0.05 * s as f64)).collect();
    let img = assemble(&lines, 0.05, 0.0, 1.0).unwrap();
    let rect = (10, 30, 1, 4);
    let once = postprocess(&img, rect).unwrap();
    assert_eq!(postprocess(&once, rect).unwrap(), once);
    let mut vals: Vec<f64> = once.values().to_vec();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals.dedup();
    assert_eq!(vals.len(), 2);
    assert_eq!(vals[0], 1.0);
}

#[test]
fn pgm_scales_phantom_maximum_to_white() {
    let uni = SlantRangeImage::new(vec![1.0; 12], 3, 4, 0.05, 0.0, 0.1).unwrap();
    let p = to_pgm(&uni);
    let header = b"P5\n3 4\n255\n";
    assert!(p[header.len()..].iter().all(|&g| g == p[header.len()]));
    let mut v = vec![1.0; 12];
    v[5] = 7.0;
    let img = SlantRangeImage::new(v, 3, 4, 0.05, 0.0, 0.1).unwrap();
    let p = to_pgm(&img);
    // source 1, range 1 -> row 1, column 1
    assert_eq!(p[header.len() + 3 + 1], 255);
    assert_eq!(p.iter().skip(header.len()).filter(|&&g| g == 255).count(), 1);
}

#[test]
fn values_below_one_are_rejected() {
    assert!(SlantRangeImage::new(vec![0.9, 1.0], 1, 2, 0.05, 0.0, 0.1).is_err());
}
