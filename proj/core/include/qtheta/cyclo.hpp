#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace qtheta {

// Q(zeta_m) presented as Q[z]/Phi_m(z).  Fields are interned: one instance per m,
// alive for the whole process, so elements can hold a plain pointer.
class CycloField {
 public:
  static const CycloField& get(int m);

  int order() const { return m_; }
  int degree() const { return static_cast<int>(phi_.size()) - 1; }
  // Phi_m, monic, coefficients from low to high degree.
  const std::vector<mpq_class>& modulus() const { return phi_; }
  // Order M of the root of unity group available in the field: lcm(2, m).
  int root_order() const { return m_ % 2 == 0 ? m_ : 2 * m_; }
  // omega^k for the primitive M-th root omega (omega = z for even m, -z for odd m).
  const std::vector<mpq_class>& omega_power(long k) const;

 private:
  explicit CycloField(int m);
  int m_;
  std::vector<mpq_class> phi_;
  std::vector<std::vector<mpq_class>> omega_pows_;
};

class Cyclo {
 public:
  Cyclo();
  Cyclo(long v);  // NOLINT: rationals convert implicitly
  Cyclo(const mpq_class& v);  // NOLINT
  Cyclo(const CycloField& field, std::vector<mpq_class> coeffs);

  static Cyclo zeta_power(const CycloField& field, long k);
  static Cyclo root_of_unity(const CycloField& field, long k);

  const CycloField& field() const { return *field_; }
  const std::vector<mpq_class>& coeffs() const { return c_; }

  bool is_zero() const;
  bool is_one() const;
  bool is_rational() const;
  const mpq_class& constant_term() const { return c_[0]; }

  Cyclo operator-() const;
  Cyclo& operator+=(const Cyclo& o);
  Cyclo& operator-=(const Cyclo& o);
  Cyclo& operator*=(const Cyclo& o);
  friend Cyclo operator+(Cyclo a, const Cyclo& b) { return a += b; }
  friend Cyclo operator-(Cyclo a, const Cyclo& b) { return a -= b; }
  friend Cyclo operator*(Cyclo a, const Cyclo& b) { return a *= b; }
  friend bool operator==(const Cyclo& a, const Cyclo& b);
  friend bool operator!=(const Cyclo& a, const Cyclo& b) { return !(a == b); }

  Cyclo inverse() const;
  Cyclo pow(long e) const;
  // k with *this == omega^k, if this is a root of unity of the field.
  std::optional<long> root_log() const;
  // Square root when this is (rational square) * (root of unity with an available square root).
  std::optional<Cyclo> sqrt() const;

  std::string to_string() const;
  std::vector<std::string> to_strings() const;
  static Cyclo from_strings(const CycloField& field, const std::vector<std::string>& parts);

 private:
  void reduce(std::vector<mpq_class>& p);
  void promote_to(const CycloField& f);
  void align(Cyclo& o);
  const CycloField* field_;
  std::vector<mpq_class> c_;
};

std::string rational_string(const mpq_class& q);
mpq_class parse_rational(const std::string& s);

}  // namespace qtheta
