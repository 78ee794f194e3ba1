use ridgelet::mnist::{
    load_mnist, load_mnist_dir, write_idx_images, write_idx_labels, IMAGE_MAGIC,
};
use std::path::Path;
use tempfile::tempdir;

// three 2x3 images
const PIXELS: [u8; 18] = [
    0, 255, 128, 1, 2, 3, 10, 20, 30, 40, 50, 60, 255, 255, 255, 0, 0, 0,
];
const LABELS: [u8; 3] = [7, 0, 9];

fn header(magic: u32, dims: &[u32]) -> Vec<u8> {
    let mut v = magic.to_be_bytes().to_vec();
    for d in dims {
        v.extend_from_slice(&d.to_be_bytes());
    }
    v
}

fn write(path: &Path, bytes: &[u8]) {
    std::fs::write(path, bytes).unwrap();
}

fn fixture(dir: &Path, suffix: &str) -> (std::path::PathBuf, std::path::PathBuf) {
    let img = dir.join(format!("imgs{suffix}"));
    let lab = dir.join(format!("labs{suffix}"));
    write_idx_images(&img, 2, 3, &PIXELS).unwrap();
    write_idx_labels(&lab, &LABELS).unwrap();
    (img, lab)
}

#[test]
fn raw_and_gzip_fixtures_load_identically() {
    let dir = tempdir().unwrap();
    let (img, lab) = fixture(dir.path(), "");
    let (gimg, glab) = fixture(dir.path(), ".gz");
    let raw = load_mnist(&img, &lab).unwrap();
    assert_eq!(raw, load_mnist(&gimg, &glab).unwrap());
    assert_eq!((raw.len(), raw.rows, raw.cols), (3, 2, 3));
    assert_eq!(raw.labels, LABELS);
    assert_eq!(raw.images[(0, 1)], 1.0);
    assert_eq!(raw.images[(0, 2)], 128.0 / 255.0);
    assert_eq!(raw.images[(2, 5)], 0.0);
    let bytes = std::fs::read(&img).unwrap();
    assert_eq!(&bytes[..16], header(IMAGE_MAGIC, &[3, 2, 3]).as_slice());
}

#[test]
fn directory_loader_prefers_raw_then_gz() {
    let dir = tempdir().unwrap();
    write_idx_images(
        &dir.path().join("train-images-idx3-ubyte.gz"),
        2,
        3,
        &PIXELS,
    )
    .unwrap();
    write_idx_labels(&dir.path().join("train-labels-idx1-ubyte.gz"), &LABELS).unwrap();
    write_idx_images(
        &dir.path().join("t10k-images-idx3-ubyte"),
        2,
        3,
        &PIXELS[..6],
    )
    .unwrap();
    write_idx_labels(&dir.path().join("t10k-labels-idx1-ubyte"), &LABELS[..1]).unwrap();
    let (train, test) = load_mnist_dir(dir.path()).unwrap();
    assert_eq!((train.len(), test.len()), (3, 1));
}

fn load_err(images: &[u8], labels: &[u8]) -> ridgelet::Error {
    let dir = tempdir().unwrap();
    let (img, lab) = (dir.path().join("i"), dir.path().join("l"));
    write(&img, images);
    write(&lab, labels);
    load_mnist(&img, &lab).unwrap_err()
}

fn good_images() -> Vec<u8> {
    let mut v = header(0x803, &[3, 2, 3]);
    v.extend_from_slice(&PIXELS);
    v
}

fn good_labels() -> Vec<u8> {
    let mut v = header(0x801, &[3]);
    v.extend_from_slice(&LABELS);
    v
}

#[test]
fn malformed_files_are_format_errors() {
    let cases: Vec<(&str, Vec<u8>, Vec<u8>)> = vec![
        ("empty", vec![], good_labels()),
        (
            "bad magic",
            [header(0x804, &[3, 2, 3]), PIXELS.to_vec()].concat(),
            good_labels(),
        ),
        ("truncated", good_images()[..20].to_vec(), good_labels()),
        ("trailing", [good_images(), vec![1]].concat(), good_labels()),
        (
            "count mismatch",
            good_images(),
            [header(0x801, &[2]), vec![1, 2]].concat(),
        ),
        (
            "label magic",
            good_images(),
            [header(0x803, &[3]), LABELS.to_vec()].concat(),
        ),
    ];
    for (name, img, lab) in cases {
        let err = load_err(&img, &lab);
        assert_eq!(err.category(), "format", "{name}: {err}");
    }
}

#[test]
fn out_of_range_label_is_rejected() {
    let err = load_err(
        &good_images(),
        &[header(0x801, &[3]), vec![1, 10, 2]].concat(),
    );
    assert!(matches!(err, ridgelet::Error::Range(_)), "{err}");
    assert!(err.to_string().contains("label 10"));
}

#[test]
fn missing_file_is_io() {
    let dir = tempdir().unwrap();
    let err = load_mnist(&dir.path().join("nope"), &dir.path().join("nope2")).unwrap_err();
    assert_eq!(err.category(), "io");
}
