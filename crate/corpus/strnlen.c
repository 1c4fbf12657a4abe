/* strnlen from lib/string.c. The decrement of count is moved out of
 * the loop condition. */

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases n;
  @  @ ensures 0 <= strnlen(s, n) <= n;
  @  @/
  @ void strnlen_in_range(const char *s, size_t n)
  @ {
  @   if (n > 0 && *s != '\0')
  @     strnlen_in_range(s + 1, n - 1);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases n;
  @  @ ensures strnlen(s, n) <= strlen(s);
  @  @/
  @ void strnlen_le_strlen(const char *s, size_t n)
  @ {
  @   if (n > 0 && *s != '\0')
  @     strnlen_le_strlen(s + 1, n - 1);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s) && strlen(s) <= n;
  @  @ decreases n;
  @  @ ensures strnlen(s, n) == strlen(s);
  @  @/
  @ void strnlen_strlen(const char *s, size_t n)
  @ {
  @   if (n > 0 && *s != '\0')
  @     strnlen_strlen(s + 1, n - 1);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s) && n <= strlen(s);
  @  @ decreases n;
  @  @ ensures strnlen(s, n) == n;
  @  @/
  @ void strnlen_bounded(const char *s, size_t n)
  @ {
  @   if (n > 0)
  @     strnlen_bounded(s + 1, n - 1);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s) && 0 <= i < strnlen(s, n);
  @  @ decreases i;
  @  @ ensures s[i] != '\0';
  @  @/
  @ void strnlen_nonzero(const char *s, size_t n, size_t i)
  @ {
  @   if (i > 0)
  @     strnlen_nonzero(s + 1, n - 1, i - 1);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s) && m <= n;
  @  @ decreases m;
  @  @ ensures strnlen(s, m) <= strnlen(s, n);
  @  @/
  @ void strnlen_monotone(const char *s, size_t m, size_t n)
  @ {
  @   if (m > 0 && *s != '\0')
  @     strnlen_monotone(s + 1, m - 1, n - 1);
  @ }
  @*/

/*@ ghost
  @ /@ assigns \nothing;
  @  @ ensures \result == (a < b ? a : b);
  @  @/
  @ size_t min_size(size_t a, size_t b)
  @ {
  @   if (a < b)
  @     return a;
  @   return b;
  @ }
  @*/

/*@ ghost
  @ /@ requires valid_str(s);
  @  @ assigns \nothing;
  @  @ decreases n;
  @  @ ensures \result == strnlen(s, n);
  @  @/
  @ size_t strnlen_rec(const char *s, size_t n)
  @ {
  @   if (n == 0 || *s == '\0')
  @     return 0;
  @   strnlen_in_range(s + 1, n - 1);
  @   size_t r = strnlen_rec(s + 1, n - 1);
  @   return r + 1;
  @ }
  @*/

/*@ ghost
  @ /@ requires valid_str(s);
  @  @ assigns \nothing;
  @  @ ensures \result != 0 <==> strnlen(s, n) == n;
  @  @/
  @ int strnlen_reaches(const char *s, size_t n)
  @ {
  @   size_t k = strnlen_rec(s, n);
  @   return k == n;
  @ }
  @*/

/*@ requires valid_str(s);
  @ assigns \nothing;
  @ ensures \result == strnlen(s, count);
  @*/
size_t strnlen(const char *s, size_t count)
{
    const char *sc;

    /*@ loop invariant s <= sc <= s + strlen(s);
      @ loop invariant valid_str(sc);
      @ loop invariant strlen(sc) == strlen(s) - (sc - s);
      @ loop invariant count == \old(count) - (sc - s);
      @ loop invariant strnlen(s, \old(count)) == (sc - s) + strnlen(sc, count);
      @ loop variant strlen(sc);
      @*/
    for (sc = s; count != 0 && *sc != '\0'; ++sc)
        count--;
    return sc - s;
}
