//! Bit-exact codec for the extended Beacon Interval Control field and the
//! Next DMG ATI start-time rule.
//!
//! The field spans 48 bits (6 bytes), numbered B0–B47 with B0 the least
//! significant bit of the first byte. This crate defines the subfields it
//! uses and passes every other bit through untouched:
//!
//! | bits    | subfield        | encoding                                   |
//! |---------|-----------------|--------------------------------------------|
//! | B11–B13 | A-BFT Length    | slot count − 1                             |
//! | B14–B17 | FSS             | frames per slot − 1                        |
//! | B43     | extension flag  | 1 when an extended region is advertised    |
//! | B44     | OI              | overload indicator                          |
//! | B45–B47 | E-A-BFT Length  | extended slot count − 1, valid when B43 = 1 |
//!
//! With the flag clear, B45–B47 belong to the opaque remainder and an
//! extended count of 0 is implied; with the flag set, `000b` means one
//! extended slot and `111b` means eight. A legacy element leaves B43–B47
//! zero and round-trips bit-identically. See `FORMAT.md` for the full
//! layout notes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::AbftLayout;

/// Size of the Beacon Interval Control field in bytes.
pub const BIC_LEN: usize = 6;

const ABFT_LENGTH_BIT: usize = 11;
const FSS_BIT: usize = 14;
const EXT_PRESENT_BIT: usize = 43;
const OI_BIT: usize = 44;
const E_ABFT_LENGTH_BIT: usize = 45;

fn get_bits(bytes: &[u8], lo: usize, width: usize) -> u32 {
    let mut value = 0u32;
    for offset in 0..width {
        let bit = lo + offset;
        if bytes[bit / 8] >> (bit % 8) & 1 == 1 {
            value |= 1 << offset;
        }
    }
    value
}

fn set_bits(bytes: &mut [u8; BIC_LEN], lo: usize, width: usize, value: u32) {
    for offset in 0..width {
        let bit = lo + offset;
        let mask = 1u8 << (bit % 8);
        if value >> offset & 1 == 1 {
            bytes[bit / 8] |= mask;
        } else {
            bytes[bit / 8] &= !mask;
        }
    }
}

/// Bits owned by the decoded subfields; B45–B47 only when the extension
/// flag is set.
fn field_mask(extension_present: bool) -> [u8; BIC_LEN] {
    let mut mask = [0u8; BIC_LEN];
    set_bits(&mut mask, ABFT_LENGTH_BIT, 3, 0b111);
    set_bits(&mut mask, FSS_BIT, 4, 0b1111);
    set_bits(&mut mask, EXT_PRESENT_BIT, 1, 1);
    set_bits(&mut mask, OI_BIT, 1, 1);
    if extension_present {
        set_bits(&mut mask, E_ABFT_LENGTH_BIT, 3, 0b111);
    }
    mask
}

fn strip_fields(mut payload: [u8; BIC_LEN], extension_present: bool) -> [u8; BIC_LEN] {
    for (byte, mask) in payload.iter_mut().zip(field_mask(extension_present)) {
        *byte &= !mask;
    }
    payload
}

/// Decoded Beacon Interval Control field.
///
/// `payload` carries every bit outside the defined subfields, with the
/// subfield positions zeroed (the canonical form the constructors enforce).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeaconIntervalControl {
    /// Legacy slot count, 1..=8.
    pub abft_length: u32,
    /// SSW frames per slot, 1..=16.
    pub fss: u32,
    /// Overload indicator (B44).
    pub oi: bool,
    /// Extended slot count, 0..=8; 0 means no extension advertised.
    pub e_abft_length: u32,
    /// Opaque remainder of the 48-bit field.
    pub payload: [u8; BIC_LEN],
}

impl BeaconIntervalControl {
    pub fn new(abft_length: u32, fss: u32, oi: bool, e_abft_length: u32) -> Self {
        BeaconIntervalControl {
            abft_length,
            fss,
            oi,
            e_abft_length,
            payload: [0; BIC_LEN],
        }
    }

    /// Replaces the opaque remainder, zeroing the subfield positions.
    pub fn with_payload(mut self, payload: [u8; BIC_LEN]) -> Self {
        self.payload = strip_fields(payload, self.e_abft_length >= 1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=8).contains(&self.abft_length) {
            return Err(Error::range_u("abft_length", self.abft_length as u64, 1, 8));
        }
        if !(1..=16).contains(&self.fss) {
            return Err(Error::range_u("fss", self.fss as u64, 1, 16));
        }
        if self.e_abft_length > 8 {
            return Err(Error::range_u(
                "e_abft_length",
                self.e_abft_length as u64,
                0,
                8,
            ));
        }
        Ok(())
    }
}

/// Packs the field into its 6-byte wire form.
///
/// Deterministic: subfields land on their exact bit positions and every
/// other bit comes from the opaque payload.
pub fn encode_bic(fields: &BeaconIntervalControl) -> Result<[u8; BIC_LEN]> {
    fields.validate()?;
    let extension = fields.e_abft_length >= 1;
    let mut out = strip_fields(fields.payload, extension);
    set_bits(&mut out, ABFT_LENGTH_BIT, 3, fields.abft_length - 1);
    set_bits(&mut out, FSS_BIT, 4, fields.fss - 1);
    set_bits(&mut out, EXT_PRESENT_BIT, 1, extension as u32);
    set_bits(&mut out, OI_BIT, 1, fields.oi as u32);
    if extension {
        set_bits(&mut out, E_ABFT_LENGTH_BIT, 3, fields.e_abft_length - 1);
    }
    Ok(out)
}

/// Unpacks a Beacon Interval Control field from the first 6 bytes of input.
///
/// Total over arbitrary bytes: every input either decodes (the subfield
/// encodings cover their whole bit ranges) or reports truncation. Re-encoding
/// a decoded value reproduces the input bytes exactly.
pub fn decode_bic(bytes: &[u8]) -> Result<BeaconIntervalControl> {
    if bytes.len() < BIC_LEN {
        return Err(Error::Truncated {
            needed: BIC_LEN,
            got: bytes.len(),
        });
    }
    let mut raw = [0u8; BIC_LEN];
    raw.copy_from_slice(&bytes[..BIC_LEN]);
    let extension = get_bits(&raw, EXT_PRESENT_BIT, 1) == 1;
    Ok(BeaconIntervalControl {
        abft_length: get_bits(&raw, ABFT_LENGTH_BIT, 3) + 1,
        fss: get_bits(&raw, FSS_BIT, 4) + 1,
        oi: get_bits(&raw, OI_BIT, 1) == 1,
        e_abft_length: if extension {
            get_bits(&raw, E_ABFT_LENGTH_BIT, 3) + 1
        } else {
            0
        },
        payload: strip_fields(raw, extension),
    })
}

/// Start time of the next announcement interval, delayed past both slot
/// regions so legacy and extended stations finish training together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NextDmgAti {
    /// Delay in whole A-BFT slots: `abft_length + e_abft_length`.
    pub start_time_slots: u32,
    /// The same delay in microseconds.
    pub start_time_us: u64,
}

/// Computes the Next DMG ATI start time for a layout.
pub fn ati_start_time(layout: &AbftLayout) -> NextDmgAti {
    let slots = layout.total_slots();
    NextDmgAti {
        start_time_slots: slots,
        start_time_us: slots as u64 * layout.slot_duration_us(),
    }
}
