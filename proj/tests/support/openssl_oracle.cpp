#include "openssl_oracle.hpp"

#include <openssl/bio.h>
#include <openssl/bn.h>
#include <openssl/evp.h>
#include <openssl/ocsp.h>
#include <openssl/x509.h>
#include <openssl/x509v3.h>

#include <memory>
#include <sstream>
#include <stdexcept>

namespace staplegrid::oracle {

namespace {

struct X509Free {
  void operator()(X509* p) const { X509_free(p); }
};
using X509Ptr = std::unique_ptr<X509, X509Free>;

X509Ptr load(BytesView der) {
  const unsigned char* p = der.data();
  X509Ptr x(d2i_X509(nullptr, &p, static_cast<long>(der.size())));
  if (!x) throw std::runtime_error("OpenSSL cannot parse certificate");
  return x;
}

// Minimal whole-byte form: "0606AB" and "606AB" both become "0606AB".
std::string even_hex(std::string s) {
  while (s.size() > 1 && s[0] == '0') s.erase(0, 1);
  if (s.size() % 2) s.insert(s.begin(), '0');
  return s;
}

std::string bn_hex(const ASN1_INTEGER* i) {
  BIGNUM* bn = ASN1_INTEGER_to_BN(i, nullptr);
  char* hex = BN_bn2hex(bn);
  std::string s(hex);
  OPENSSL_free(hex);
  BN_free(bn);
  return even_hex(std::move(s));
}

Bytes as_bytes(const ASN1_OCTET_STRING* s) {
  return Bytes(s->data, s->data + s->length);
}

Bytes md(const EVP_MD* m, BytesView data) {
  Bytes out(static_cast<std::size_t>(EVP_MD_get_size(m)));
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), out.data(), &len, m, nullptr);
  return out;
}

std::string bio_string(BIO* bio) {
  char* data = nullptr;
  long len = BIO_get_mem_data(bio, &data);
  return std::string(data, static_cast<std::size_t>(len));
}

}  // namespace

std::string cert_serial_hex(BytesView cert_der) { return bn_hex(X509_get0_serialNumber(load(cert_der).get())); }

std::string cert_subject_der_hex(BytesView cert_der) {
  auto x = load(cert_der);
  unsigned char* buf = nullptr;
  int len = i2d_X509_NAME(X509_get_subject_name(x.get()), &buf);
  std::string hex = to_hex(BytesView(buf, static_cast<std::size_t>(len)));
  OPENSSL_free(buf);
  return hex;
}

bool cert_verifies(BytesView cert_der, BytesView issuer_der) {
  auto cert = load(cert_der);
  auto issuer = load(issuer_der);
  return X509_verify(cert.get(), X509_get0_pubkey(issuer.get())) == 1;
}

bool crl_verifies(BytesView crl_der, BytesView issuer_der) {
  const unsigned char* p = crl_der.data();
  X509_CRL* crl = d2i_X509_CRL(nullptr, &p, static_cast<long>(crl_der.size()));
  if (!crl) return false;
  auto issuer = load(issuer_der);
  bool ok = X509_CRL_verify(crl, X509_get0_pubkey(issuer.get())) == 1;
  X509_CRL_free(crl);
  return ok;
}

std::string cert_ocsp_url(BytesView cert_der) {
  auto cert = load(cert_der);
  STACK_OF(OPENSSL_STRING)* urls = X509_get1_ocsp(cert.get());
  std::string out;
  if (urls && sk_OPENSSL_STRING_num(urls) > 0) out = sk_OPENSSL_STRING_value(urls, 0);
  X509_email_free(urls);
  return out;
}

Bytes issuer_name_der(BytesView issuer_der) {
  auto x = load(issuer_der);
  unsigned char* buf = nullptr;
  int len = i2d_X509_NAME(X509_get_subject_name(x.get()), &buf);
  Bytes out(buf, buf + len);
  OPENSSL_free(buf);
  return out;
}

Bytes issuer_key_bits(BytesView issuer_der) {
  auto x = load(issuer_der);
  const ASN1_BIT_STRING* bits = X509_get0_pubkey_bitstr(x.get());
  return Bytes(bits->data, bits->data + bits->length);
}

Bytes sha1(BytesView data) { return md(EVP_sha1(), data); }
Bytes sha256(BytesView data) { return md(EVP_sha256(), data); }

OracleCertId cert_id(BytesView cert_der, BytesView issuer_der, bool use_sha256) {
  auto cert = load(cert_der);
  auto issuer = load(issuer_der);
  OCSP_CERTID* id = OCSP_cert_to_id(use_sha256 ? EVP_sha256() : EVP_sha1(), cert.get(), issuer.get());
  ASN1_OCTET_STRING* name_hash = nullptr;
  ASN1_OCTET_STRING* key_hash = nullptr;
  ASN1_INTEGER* serial = nullptr;
  OCSP_id_get0_info(&name_hash, nullptr, &key_hash, &serial, id);
  OracleCertId out{as_bytes(name_hash), as_bytes(key_hash), bn_hex(serial)};
  OCSP_CERTID_free(id);
  return out;
}

std::string crl_text_dump(BytesView crl_der) {
  const unsigned char* p = crl_der.data();
  X509_CRL* crl = d2i_X509_CRL(nullptr, &p, static_cast<long>(crl_der.size()));
  if (!crl) throw std::runtime_error("OpenSSL cannot parse CRL");
  BIO* bio = BIO_new(BIO_s_mem());
  X509_CRL_print(bio, crl);
  std::string text = bio_string(bio);
  BIO_free(bio);
  X509_CRL_free(crl);
  return text;
}

std::vector<DumpEntry> parse_crl_dump(const std::string& text) {
  std::vector<DumpEntry> out;
  std::istringstream in(text);
  std::string line;
  bool expect_reason = false;
  while (std::getline(in, line)) {
    auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    std::string t = line.substr(start);
    while (!t.empty() && (t.back() == ' ' || t.back() == '\r')) t.pop_back();
    if (t.rfind("Serial Number:", 0) == 0) {
      std::string serial = t.substr(14);
      serial.erase(0, serial.find_first_not_of(' '));
      out.push_back({even_hex(serial), {}});
      expect_reason = false;
    } else if (t == "X509v3 CRL Reason Code:") {
      expect_reason = true;
    } else if (expect_reason && !out.empty()) {
      out.back().reason = t;
      expect_reason = false;
    }
  }
  return out;
}

RsaCrlFixture build_reference_rsa_crl() {
  EVP_PKEY* key = EVP_RSA_gen(2048);

  X509_NAME* name = X509_NAME_new();
  for (auto [field, value] : {std::pair{"C", "aa"}, {"ST", "aa"}, {"L", "aa"}, {"O", "aa"}, {"OU", "aa"},
                              {"CN", "rootca"}}) {
    X509_NAME_add_entry_by_txt(name, field, MBSTRING_ASC, reinterpret_cast<const unsigned char*>(value), -1, -1, 0);
  }

  X509* ca = X509_new();
  X509_set_version(ca, 2);
  ASN1_INTEGER_set(X509_get_serialNumber(ca), 1);
  X509_set_issuer_name(ca, name);
  X509_set_subject_name(ca, name);
  ASN1_TIME_set_string(X509_getm_notBefore(ca), "20230101000000Z");
  ASN1_TIME_set_string(X509_getm_notAfter(ca), "20330101000000Z");
  X509_set_pubkey(ca, key);
  X509V3_CTX v3;
  X509V3_set_ctx(&v3, ca, ca, nullptr, nullptr, 0);
  X509_EXTENSION* bc = X509V3_EXT_conf_nid(nullptr, &v3, NID_basic_constraints, "critical,CA:TRUE");
  X509_add_ext(ca, bc, -1);
  X509_EXTENSION_free(bc);
  X509_sign(ca, key, EVP_sha256());

  X509_CRL* crl = X509_CRL_new();  // no version field: a v1 list
  X509_CRL_set_issuer_name(crl, name);
  ASN1_TIME* when = ASN1_TIME_new();
  ASN1_TIME_set_string(when, "230504195727Z");
  X509_CRL_set1_lastUpdate(crl, when);
  for (const char* hex : {"221A0A99711F9968", "308C707EA89F47A5", "5238F3475665F7C4"}) {
    X509_REVOKED* rev = X509_REVOKED_new();
    BIGNUM* bn = nullptr;
    BN_hex2bn(&bn, hex);
    ASN1_INTEGER* serial = BN_to_ASN1_INTEGER(bn, nullptr);
    X509_REVOKED_set_serialNumber(rev, serial);
    X509_REVOKED_set_revocationDate(rev, when);
    ASN1_ENUMERATED* reason = ASN1_ENUMERATED_new();
    ASN1_ENUMERATED_set(reason, 1);
    X509_REVOKED_add1_ext_i2d(rev, NID_crl_reason, reason, 0, 0);
    ASN1_ENUMERATED_free(reason);
    X509_CRL_add0_revoked(crl, rev);
    ASN1_INTEGER_free(serial);
    BN_free(bn);
  }
  X509_CRL_sort(crl);
  X509_CRL_sign(crl, key, EVP_sha256());

  RsaCrlFixture out;
  unsigned char* buf = nullptr;
  int len = i2d_X509_CRL(crl, &buf);
  out.crl_der.assign(buf, buf + len);
  OPENSSL_free(buf);
  buf = nullptr;
  len = i2d_X509(ca, &buf);
  out.issuer_cert_der.assign(buf, buf + len);
  OPENSSL_free(buf);

  ASN1_TIME_free(when);
  X509_CRL_free(crl);
  X509_free(ca);
  X509_NAME_free(name);
  EVP_PKEY_free(key);
  return out;
}

bool ocsp_verifies(BytesView response_der, BytesView root_der, std::int64_t at_unix) {
  const unsigned char* p = response_der.data();
  OCSP_RESPONSE* resp = d2i_OCSP_RESPONSE(nullptr, &p, static_cast<long>(response_der.size()));
  if (!resp) return false;
  OCSP_BASICRESP* basic = OCSP_response_get1_basic(resp);
  auto root = load(root_der);
  X509_STORE* store = X509_STORE_new();
  X509_STORE_add_cert(store, root.get());
  if (at_unix != 0) X509_VERIFY_PARAM_set_time(X509_STORE_get0_param(store), static_cast<time_t>(at_unix));
  STACK_OF(X509)* certs = sk_X509_new_null();
  sk_X509_push(certs, root.get());
  bool ok = basic && OCSP_basic_verify(basic, certs, store, OCSP_TRUSTOTHER) == 1;
  sk_X509_free(certs);
  X509_STORE_free(store);
  OCSP_BASICRESP_free(basic);
  OCSP_RESPONSE_free(resp);
  return ok;
}

std::string ocsp_first_status(BytesView response_der) {
  const unsigned char* p = response_der.data();
  OCSP_RESPONSE* resp = d2i_OCSP_RESPONSE(nullptr, &p, static_cast<long>(response_der.size()));
  if (!resp) return "unparseable";
  OCSP_BASICRESP* basic = OCSP_response_get1_basic(resp);
  std::string out = "none";
  if (basic && OCSP_resp_count(basic) > 0) {
    OCSP_SINGLERESP* single = OCSP_resp_get0(basic, 0);
    int reason = 0;
    int status = OCSP_single_get0_status(single, &reason, nullptr, nullptr, nullptr);
    out = OCSP_cert_status_str(status);
  }
  OCSP_BASICRESP_free(basic);
  OCSP_RESPONSE_free(resp);
  return out;
}

int ocsp_request_count(BytesView request_der) {
  const unsigned char* p = request_der.data();
  OCSP_REQUEST* req = d2i_OCSP_REQUEST(nullptr, &p, static_cast<long>(request_der.size()));
  if (!req) return -1;
  int n = OCSP_request_onereq_count(req);
  OCSP_REQUEST_free(req);
  return n;
}

Bytes openssl_ocsp_request(BytesView cert_der, BytesView issuer_der, bool with_nonce) {
  auto cert = load(cert_der);
  auto issuer = load(issuer_der);
  OCSP_REQUEST* req = OCSP_REQUEST_new();
  OCSP_request_add0_id(req, OCSP_cert_to_id(EVP_sha1(), cert.get(), issuer.get()));
  if (with_nonce) OCSP_request_add1_nonce(req, nullptr, 16);
  unsigned char* buf = nullptr;
  int len = i2d_OCSP_REQUEST(req, &buf);
  Bytes out(buf, buf + len);
  OPENSSL_free(buf);
  OCSP_REQUEST_free(req);
  return out;
}

}  // namespace staplegrid::oracle
