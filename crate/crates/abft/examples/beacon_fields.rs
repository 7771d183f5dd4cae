//! Signaling the schemes on the air: the Beacon Interval Control field.
//!
//! Packs slot counts, the FSS budget, the overload indicator, and the
//! extended-region length into the 6-byte element, shows the exact bit
//! placements, and derives the announcement-interval start time that keeps
//! legacy and extended stations in lockstep.
//!
//! ```bash
//! cargo run -p abft --example beacon_fields
//! ```

use abft::codec::{ati_start_time, decode_bic, encode_bic, BeaconIntervalControl};
use abft::types::AbftLayout;

fn bit(bytes: &[u8], position: usize) -> u8 {
    bytes[position / 8] >> (position % 8) & 1
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn main() -> abft::Result<()> {
    let dense = BeaconIntervalControl::new(8, 16, true, 8);
    let wire = encode_bic(&dense)?;
    println!("dense deployment: 8 legacy + 8 extended slots, FSS 16, overloaded");
    println!("  wire bytes : {}", hex(&wire));
    println!(
        "  B11–B13 A-BFT Length−1 : {}{}{}",
        bit(&wire, 13),
        bit(&wire, 12),
        bit(&wire, 11)
    );
    println!(
        "  B14–B17 FSS−1          : {}{}{}{}",
        bit(&wire, 17),
        bit(&wire, 16),
        bit(&wire, 15),
        bit(&wire, 14)
    );
    println!("  B43 extension flag     : {}", bit(&wire, 43));
    println!("  B44 overload indicator : {}", bit(&wire, 44));
    println!(
        "  B45–B47 E-A-BFT−1      : {}{}{}",
        bit(&wire, 47),
        bit(&wire, 46),
        bit(&wire, 45)
    );

    let decoded = decode_bic(&wire)?;
    assert_eq!(decoded, dense);
    println!("  decodes back to the same fields");

    // A pure legacy element keeps its reserved bits and round-trips as-is.
    let legacy = encode_bic(&BeaconIntervalControl::new(8, 16, false, 0))?;
    println!("\nlegacy element : {}  (B43–B47 all clear)", hex(&legacy));

    let layout = AbftLayout::new(8, 8, 16).validate()?;
    let ati = ati_start_time(&layout);
    println!(
        "\nnext announcement interval starts after {} slots = {} µs",
        ati.start_time_slots, ati.start_time_us
    );
    println!("(one slot = {} µs: 16 frames of 15 µs + 1 µs spacing)", layout.slot_duration_us());
    Ok(())
}
