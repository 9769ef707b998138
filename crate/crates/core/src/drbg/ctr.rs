//! CTR_DRBG over AES-256 (NIST SP 800-90A, section 10.2).
//!
//! Both the derivation-function profile and the no-df profile are
//! implemented. The default mechanism of this crate uses the no-df profile
//! with no personalization string, where the 384-bit entropy input is the
//! whole seed.

use aes::cipher::generic_array::GenericArray;
use aes::cipher::{BlockEncrypt, KeyInit};
use aes::Aes256;

use crate::error::{Error, Result};

pub const KEY_LEN: usize = 32;
pub const BLOCK_LEN: usize = 16;
/// seedlen = keylen + outlen.
pub const SEED_LEN: usize = KEY_LEN + BLOCK_LEN;
/// Largest request allowed by the standard: 2^19 bits.
pub const MAX_REQUEST_BYTES: usize = 1 << 16;
/// reseed_interval for the AES-based CTR_DRBG.
pub const RESEED_INTERVAL: u64 = 1 << 48;

#[derive(Clone)]
pub struct CtrDrbg {
    key: [u8; KEY_LEN],
    v: [u8; BLOCK_LEN],
    reseed_counter: u64,
    reseed_interval: u64,
    use_df: bool,
}

impl std::fmt::Debug for CtrDrbg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // Never print key material.
        f.debug_struct("CtrDrbg")
            .field("reseed_counter", &self.reseed_counter)
            .field("use_df", &self.use_df)
            .finish_non_exhaustive()
    }
}

impl CtrDrbg {
    /// Instantiate without a derivation function. `entropy` must be exactly
    /// `SEED_LEN` bytes and `personalization` at most `SEED_LEN` bytes.
    pub fn new_no_df(entropy: &[u8], personalization: &[u8]) -> Result<Self> {
        if entropy.len() != SEED_LEN {
            return Err(Error::SeedLength {
                mechanism: "ctr-drbg-256",
                expected: SEED_LEN * 8,
                actual: entropy.len() * 8,
            });
        }
        let mut seed_material = padded(personalization)?;
        xor_into(&mut seed_material, entropy);
        let mut drbg = CtrDrbg {
            key: [0; KEY_LEN],
            v: [0; BLOCK_LEN],
            reseed_counter: 1,
            reseed_interval: RESEED_INTERVAL,
            use_df: false,
        };
        drbg.update(&seed_material);
        Ok(drbg)
    }

    /// Instantiate with the block-cipher derivation function.
    pub fn new_df(entropy: &[u8], nonce: &[u8], personalization: &[u8]) -> Result<Self> {
        if entropy.len() < KEY_LEN {
            return Err(Error::SeedLength {
                mechanism: "ctr-drbg-256-df",
                expected: KEY_LEN * 8,
                actual: entropy.len() * 8,
            });
        }
        let input = [entropy, nonce, personalization].concat();
        let seed_material = block_cipher_df(&input);
        let mut drbg = CtrDrbg {
            key: [0; KEY_LEN],
            v: [0; BLOCK_LEN],
            reseed_counter: 1,
            reseed_interval: RESEED_INTERVAL,
            use_df: true,
        };
        drbg.update(&seed_material);
        Ok(drbg)
    }

    pub fn reseed(&mut self, entropy: &[u8], additional: &[u8]) -> Result<()> {
        let seed_material = if self.use_df {
            block_cipher_df(&[entropy, additional].concat())
        } else {
            if entropy.len() != SEED_LEN {
                return Err(Error::SeedLength {
                    mechanism: "ctr-drbg-256",
                    expected: SEED_LEN * 8,
                    actual: entropy.len() * 8,
                });
            }
            let mut m = padded(additional)?;
            xor_into(&mut m, entropy);
            m
        };
        self.update(&seed_material);
        self.reseed_counter = 1;
        Ok(())
    }

    /// Fill `out` with one generate request.
    pub fn generate(&mut self, out: &mut [u8], additional: &[u8]) -> Result<()> {
        if out.len() > MAX_REQUEST_BYTES {
            return Err(Error::InvalidArgument(format!(
                "request of {} bytes exceeds the per-request limit of {MAX_REQUEST_BYTES}",
                out.len()
            )));
        }
        if self.reseed_counter > self.reseed_interval {
            return Err(Error::ReseedRequired {
                requests: self.reseed_counter - 1,
            });
        }
        let additional = if additional.is_empty() {
            [0u8; SEED_LEN]
        } else {
            let a = if self.use_df {
                block_cipher_df(additional)
            } else {
                padded(additional)?
            };
            self.update(&a);
            a
        };

        let cipher = Aes256::new(GenericArray::from_slice(&self.key));
        for chunk in out.chunks_mut(BLOCK_LEN) {
            increment(&mut self.v);
            let mut block = GenericArray::clone_from_slice(&self.v);
            cipher.encrypt_block(&mut block);
            chunk.copy_from_slice(&block[..chunk.len()]);
        }
        self.update(&additional);
        self.reseed_counter += 1;
        Ok(())
    }

    pub fn reseed_counter(&self) -> u64 {
        self.reseed_counter
    }

    #[cfg(test)]
    pub(crate) fn set_reseed_interval(&mut self, interval: u64) {
        self.reseed_interval = interval;
    }

    fn update(&mut self, provided: &[u8; SEED_LEN]) {
        let cipher = Aes256::new(GenericArray::from_slice(&self.key));
        let mut temp = [0u8; SEED_LEN];
        for chunk in temp.chunks_mut(BLOCK_LEN) {
            increment(&mut self.v);
            let mut block = GenericArray::clone_from_slice(&self.v);
            cipher.encrypt_block(&mut block);
            chunk.copy_from_slice(&block);
        }
        xor_into(&mut temp, provided);
        self.key.copy_from_slice(&temp[..KEY_LEN]);
        self.v.copy_from_slice(&temp[KEY_LEN..]);
    }
}

fn padded(data: &[u8]) -> Result<[u8; SEED_LEN]> {
    if data.len() > SEED_LEN {
        return Err(Error::InvalidArgument(format!(
            "input of {} bytes is longer than seedlen ({SEED_LEN} bytes)",
            data.len()
        )));
    }
    let mut out = [0u8; SEED_LEN];
    out[..data.len()].copy_from_slice(data);
    Ok(out)
}

fn xor_into(dst: &mut [u8], src: &[u8]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn increment(v: &mut [u8; BLOCK_LEN]) {
    let n = u128::from_be_bytes(*v).wrapping_add(1);
    *v = n.to_be_bytes();
}

fn encrypt(cipher: &Aes256, block: &[u8; BLOCK_LEN]) -> [u8; BLOCK_LEN] {
    let mut b = GenericArray::clone_from_slice(block);
    cipher.encrypt_block(&mut b);
    b.into()
}

fn bcc(cipher: &Aes256, data: &[u8]) -> [u8; BLOCK_LEN] {
    let mut chain = [0u8; BLOCK_LEN];
    for block in data.chunks(BLOCK_LEN) {
        xor_into(&mut chain, block);
        chain = encrypt(cipher, &chain);
    }
    chain
}

/// Block_Cipher_df returning seedlen bytes.
fn block_cipher_df(input: &[u8]) -> [u8; SEED_LEN] {
    let mut s = Vec::with_capacity(input.len() + 24);
    s.extend_from_slice(&(input.len() as u32).to_be_bytes());
    s.extend_from_slice(&(SEED_LEN as u32).to_be_bytes());
    s.extend_from_slice(input);
    s.push(0x80);
    while s.len() % BLOCK_LEN != 0 {
        s.push(0);
    }

    let k: [u8; KEY_LEN] = std::array::from_fn(|i| i as u8);
    let cipher = Aes256::new(GenericArray::from_slice(&k));
    let mut temp = [0u8; KEY_LEN + BLOCK_LEN];
    for (i, chunk) in temp.chunks_mut(BLOCK_LEN).enumerate() {
        let mut iv_s = vec![0u8; BLOCK_LEN];
        iv_s[..4].copy_from_slice(&(i as u32).to_be_bytes());
        iv_s.extend_from_slice(&s);
        chunk.copy_from_slice(&bcc(&cipher, &iv_s));
    }

    let cipher = Aes256::new(GenericArray::from_slice(&temp[..KEY_LEN]));
    let mut x: [u8; BLOCK_LEN] = temp[KEY_LEN..].try_into().expect("block length");
    let mut out = [0u8; SEED_LEN];
    for chunk in out.chunks_mut(BLOCK_LEN) {
        x = encrypt(&cipher, &x);
        chunk.copy_from_slice(&x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use sha2::{Digest, Sha256};

    fn h(s: &str) -> Vec<u8> {
        hex::decode(s).unwrap()
    }

    // CAVP CTR_DRBG AES-256, no df, no prediction resistance, COUNT = 0
    // (as carried in the BoringSSL CTR-DRBG tests).
    #[test]
    fn cavp_no_df_instantiate_reseed_generate() {
        let seed = h("e4bc23c5089a19d86f4119cb3fa08c0a4991e0a1def17e101e4c14d9c323460a\
                      7c2fb58e0b086c6c57b55f56cae25bad");
        let reseed = h("fd85a836bba85019881e8c6bad23c9061adc75477659acaea8e4a01dfe07a183\
                        2dad1c136f59d70f8653a5dc118663d6");
        let mut drbg = CtrDrbg::new_no_df(&seed, &[]).unwrap();
        drbg.reseed(&reseed, &[]).unwrap();
        let mut out = [0u8; 64];
        drbg.generate(&mut out, &[]).unwrap();
        drbg.generate(&mut out, &[]).unwrap();
        assert_eq!(
            hex::encode(out),
            "b2cb8905c05e5950ca31895096be29ea3d5a3b82b269495554eb80fe07de43e1\
             93b9e7c3ece73b80e062b1c1f68202fbb1c52a040ea2478864295282234aaada"
        );
    }

    #[test]
    fn zero_seed_max_request_digest() {
        let mut drbg = CtrDrbg::new_no_df(&[0u8; SEED_LEN], &[]).unwrap();
        let mut out = vec![0u8; MAX_REQUEST_BYTES];
        drbg.generate(&mut out, &[]).unwrap();
        assert_eq!(
            hex::encode(Sha256::digest(&out)),
            "69781596cac03f6a6ded221e26d07549a04b91583cf4e36dff41bfb9f8a81c2b"
        );
    }

    struct DfVector {
        entropy: &'static str,
        nonce: &'static str,
        personal: &'static str,
        reseed: &'static str,
        add: [&'static str; 3],
        output: &'static str,
    }

    fn run_df(v: &DfVector) {
        let mut drbg = CtrDrbg::new_df(&h(v.entropy), &h(v.nonce), &h(v.personal)).unwrap();
        drbg.reseed(&h(v.reseed), &h(v.add[0])).unwrap();
        let mut out = [0u8; 64];
        drbg.generate(&mut out, &h(v.add[1])).unwrap();
        drbg.generate(&mut out, &h(v.add[2])).unwrap();
        assert_eq!(hex::encode(out), v.output);
    }

    // CAVS 14.3 CTR_DRBG AES-256 use_df vectors.
    #[test]
    fn cavs_df_vectors() {
        let vectors = [
            DfVector {
                entropy: "2d4c9f46b981c6a0b2b5d8c69391e569ff13851437ebc0fc00d616340252fed5",
                nonce: "0bf814b411f65ec4866be1abb59d3c32",
                personal: "",
                reseed: "93500fae4fa32b86033b7a7bac9d37e710dcc67ca266bc8607d665937766d207",
                add: ["", "", ""],
                output: "322dd28670e75c0ea638f3cb68d6a9d6e50ddfd052b772a7b1d78263a7b8978b\
                         6740c2b65a9550c3a76325866fa97e16d74006bc96f26249b9f0a90d076f08e5",
            },
            DfVector {
                entropy: "6f60f0f9d486bc23e1223b934e61c0c78ae9232fa2e9a87c6dacd447c3f10e9e",
                nonce: "401e3f87762fa8a14ab232ccb8480a2f",
                personal: "",
                reseed: "350be52552a65a804a106543ebb7dd046cffae104e4e8b2f18936d564d3c1950",
                add: [
                    "7a3688adb1cfb6c03264e2762ece96bfe4daf9558fabf74d7fff203c08b4dd9f",
                    "67cf4a56d081c53670f257c25557014cd5e8b0e919aa58f23d6861b10b00ea80",
                    "648d4a229198b43f33dd7dd8426650be11c5656adcdf913bb3ee5eb49a2a3892",
                ],
                output: "2d819fb9fee38bfc3f15a07ef0e183ff36db5d3184cea1d24e796ba103687415\
                         abe6d9f2c59a11931439a3d14f45fc3f4345f331a0675a3477eaf7cd89107e37",
            },
            DfVector {
                entropy: "5bb14bec3a2e435acab8b891f075107df387902cb2cd996021b1a1245d4ea2b5",
                nonce: "12ac7f444e247f770d2f4d0a65fdab4e",
                personal: "2e957d53cba5a6b9b8a2ce4369bb885c0931788015b9fe5ac3c01a7ec5eacd70",
                reseed: "19f30c84f6dbf1caf68cbec3d4bb90e5e8f5716eae8c1bbadaba99a2a2bd4eb2",
                add: ["", "", ""],
                output: "b7dd8ac2c5eaa97c779fe46cc793b9b1e7b940c318d3b531744b42856f298264\
                         e45f9a0aca5da93e7f34f0ebc0ed0ea32c009e3e03cf01320c9a839807575405",
            },
            DfVector {
                entropy: "a7a05361d428af23a0d4f132768a4b24fbd78e1f42fb46205d7b52891b2297a8",
                nonce: "8177600cb1ffea161277a839ad5d05fa",
                personal: "79ce51a1c295c9a38d11db5023c349fba347e193961c90af9e2e7326420d9028",
                reseed: "664038f3e8bfd6b0ba6552e83698b3f4945f182c400bffab74b46f07ad42764e",
                add: [
                    "a582b450eff21dc5c0bbde225cf902a4858891ff42b2cdc5208091106448582e",
                    "1fa8be0676ba5b09b84d43ac44c78432858efa4bda7b4aad8d6a7e64d155cc89",
                    "b7368a0e32ea9e176163679219580fd050f7566a318f1b6c5faf1e84e2e9070f",
                ],
                output: "56ebc22bd25e87233e27448f3d78d027fd9ab606f00ad17d9c427c7ad88a297b\
                         940f044a7e6dc548a9ec12074ac9cb87148b6b2d48d70b24cfd6e20344e7b85b",
            },
        ];
        for v in &vectors {
            run_df(v);
        }
    }

    #[test]
    fn reseed_limit_is_enforced() {
        let mut drbg = CtrDrbg::new_no_df(&[7u8; SEED_LEN], &[]).unwrap();
        drbg.set_reseed_interval(2);
        let mut out = [0u8; 16];
        drbg.generate(&mut out, &[]).unwrap();
        drbg.generate(&mut out, &[]).unwrap();
        assert!(matches!(
            drbg.generate(&mut out, &[]),
            Err(Error::ReseedRequired { requests: 2 })
        ));
        drbg.reseed(&[9u8; SEED_LEN], &[]).unwrap();
        drbg.generate(&mut out, &[]).unwrap();
    }

    #[test]
    fn rejects_wrong_entropy_length() {
        assert!(matches!(
            CtrDrbg::new_no_df(&[0u8; 13], &[]),
            Err(Error::SeedLength { actual: 104, .. })
        ));
    }
}
