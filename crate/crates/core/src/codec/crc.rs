/// CRC-32 (IEEE 802.3): reflected polynomial `0xEDB88320`, initial value and
/// final XOR `0xFFFFFFFF`.
pub fn crc32(bytes: &[u8]) -> u32 {
    crc32fast::hash(bytes)
}
