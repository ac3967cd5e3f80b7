// Build a small dump in memory, write it as LEDF, read it back and pull
// out a few rows.
//
//     cargo run --example ledf_roundtrip

use geoprobe::ledf::{read_dump_file, write_dump_file};
use geoprobe::{EmbeddingDump, ItemKind, ItemRecord, Matrix};

pub fn run_example() -> geoprobe::Result<()> {
    let words = ["river", "bank", "money", "stream"];
    let items = words
        .iter()
        .enumerate()
        .map(|(i, w)| ItemRecord::new(i as u64, *w, "demo").with_position(1))
        .collect();
    // Three layers of 4 x 3 vectors.
    let layers = (0..3)
        .map(|l| Matrix::new(4, 3, (0..12).map(|j| (j as f32 + 1.0) * (l as f32 + 1.0) / 10.0).collect()))
        .collect::<geoprobe::Result<Vec<_>>>()?;
    let dump = EmbeddingDump::new("demo-model", ItemKind::Word, items, layers)?;

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("demo.ledf");
    let bytes = write_dump_file(&dump, &path)?;
    let back = read_dump_file(&path)?;
    assert_eq!(back, dump);

    let h = &back.header;
    println!(
        "{}: {bytes} bytes, {} layers x {} items x {} dims, {} bytes of metadata",
        h.model_id, h.layer_count, h.item_count, h.dim, h.metadata_bytes
    );
    let picked = back.select_rows(2, &[3, 0])?;
    for (row, id) in picked.iter_rows().zip([3, 0]) {
        println!("layer 2 {:>7}: {row:?}", back.items[id].surface);
    }

    // Corrupt the magic and the reader refuses the file.
    let mut raw = std::fs::read(&path)?;
    raw[0] = b'X';
    match geoprobe::read_dump(raw.as_slice()) {
        Err(e) => println!("corrupted copy: {e}"),
        Ok(_) => unreachable!("bad magic accepted"),
    }
    Ok(())
}

fn main() -> geoprobe::Result<()> {
    run_example()
}
