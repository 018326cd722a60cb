use sadic::cf::{directive_sequence, Algorithm};
use sadic::fractal::approximate;
use sadic::presets::Preset;
use sadic::render::{render, Overlay, RenderSpec};
use sadic::words::{parse_word, Substitution};

#[test]
fn rauzy_direction_reproduces_its_directive() {
    let p = Preset::builtin("fig-ex-rauzy").unwrap();
    let want: String = p.directive.clone().unwrap().split_whitespace().collect();
    let exact = directive_sequence(Algorithm::Cassaigne, p.direction_rational().unwrap().unwrap(), 45).unwrap();
    assert_eq!(exact.names().concat(), want);
    let float = directive_sequence(Algorithm::Cassaigne, p.direction_f64().unwrap(), 45).unwrap();
    assert_eq!(float.ids, exact.ids);
}

#[test]
fn rauzy_fractal_pieces_are_all_present() {
    let p = Preset::builtin("fig-ex-rauzy").unwrap();
    let f = approximate(&p.sequence().unwrap(), &p.direction_f64().unwrap(), 20).unwrap();
    assert!(f.counts().iter().all(|&c| c > 0), "{:?}", f.counts());
    let spec = RenderSpec { width: 64, height: 64, ..RenderSpec::default() };
    let img = render(&f.planar(), &spec, &Overlay::default()).unwrap();
    assert!(img.pixels().any(|px| px.0 != spec.background));
}

#[test]
fn brun_period_is_a_cube() {
    let p = Preset::builtin("brun-fig").unwrap();
    let seq = p.sequence().unwrap();
    let period = (0..3).map(|k| seq.get(k).unwrap().clone()).reduce(|a, b| a.compose(&b)).unwrap();
    let tau = Substitution::new("tau", ["10", "2", "0"].iter().map(|w| parse_word(w).unwrap()).collect()).unwrap();
    assert_eq!(period.images(), tau.pow(3).images());
    let v = p.direction_f64().unwrap();
    let f = approximate(&seq, &v, 15).unwrap();
    assert_eq!(f.alphabet_size, 3);
    assert!(!f.is_empty());
}

#[test]
fn golden_direction_is_periodic() {
    let p = Preset::builtin("sturmian-golden").unwrap();
    let v = p.direction_algebraic().unwrap().unwrap();
    let rec = directive_sequence(Algorithm::Sturmian, v, 10).unwrap();
    assert_eq!(rec.period, Some(2));
    assert_eq!(rec.names().concat(), "t0t1".repeat(5));
}

#[test]
fn presets_from_files() {
    let dir = std::env::temp_dir().join(format!("sadic-presets-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("mine.json");
    std::fs::write(&path, r#"{"name": "mine", "algorithm": "brun", "directive": "b012", "periodic": true}"#).unwrap();
    let p = Preset::load(path.to_str().unwrap()).unwrap();
    assert_eq!(p.sequence().unwrap().id(5), Some(p.sequence().unwrap().id(0).unwrap()));
    std::fs::write(&path, r#"{"name": "bad", "algorithm": "brun", "colour": 1}"#).unwrap();
    assert!(Preset::load(path.to_str().unwrap()).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}
