/* strlen from lib/string.c, with the facts about string length it rests on. */

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ requires 0 <= i <= strlen(s);
  @  @ decreases i;
  @  @ ensures valid_str(s + i) && strlen(s + i) == strlen(s) - i;
  @  @/
  @ void strlen_shift(const char *s, size_t i)
  @ {
  @   if (i > 0)
  @     strlen_shift(s + 1, i - 1);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ requires 0 <= i < strlen(s);
  @  @ decreases i;
  @  @ ensures s[i] != '\0';
  @  @/
  @ void strlen_before_end(const char *s, size_t i)
  @ {
  @   if (i > 0)
  @     strlen_before_end(s + 1, i - 1);
  @ }
  @*/

/*@ ghost
  @ /@ requires valid_str(s);
  @  @ assigns \nothing;
  @  @ ensures \result == strlen(s);
  @  @/
  @ size_t strlen_proxy(const char *s)
  @ {
  @   size_t n = 0;
  @   /@ loop invariant 0 <= n <= strlen(s);
  @    @ loop variant strlen(s) - n;
  @    @/
  @   while (1) {
  @     strlen_shift(s, n);
  @     if (s[n] == '\0')
  @       break;
  @     n++;
  @   }
  @   return n;
  @ }
  @*/

/*@ ghost
  @ /@ requires valid_str(s);
  @  @ requires 0 <= i <= strlen(s);
  @  @ assigns \nothing;
  @  @ ensures \result == strlen(s) - i;
  @  @/
  @ size_t strlen_suffix(const char *s, size_t i)
  @ {
  @   strlen_shift(s, i);
  @   size_t n = strlen_proxy(s + i);
  @   return n;
  @ }
  @*/

/*@ ghost
  @ /@ requires valid_str(s);
  @  @ assigns \nothing;
  @  @ ensures \result == s + strlen(s);
  @  @ ensures *\result == '\0';
  @  @/
  @ char *str_end(const char *s)
  @ {
  @   size_t n = strlen_proxy(s);
  @   strlen_shift(s, n);
  @   return s + n;
  @ }
  @*/

/*@ ghost
  @ /@ requires valid_str(s);
  @  @ requires 0 <= i < strlen(s);
  @  @ assigns \nothing;
  @  @ ensures \result != '\0' && \result == s[i];
  @  @/
  @ char str_at(const char *s, size_t i)
  @ {
  @   strlen_shift(s, i);
  @   strlen_before_end(s, i);
  @   return s[i];
  @ }
  @*/

/*@ requires valid_str(s);
  @ assigns \nothing;
  @ ensures \result == strlen(s);
  @*/
size_t strlen(const char *s)
{
    const char *sc;

    /*@ loop invariant s <= sc <= s + strlen(s);
      @ loop invariant valid_str(sc);
      @ loop invariant strlen(sc) == strlen(s) - (sc - s);
      @ loop variant strlen(s) - (sc - s);
      @*/
    for (sc = s; *sc != '\0'; ++sc)
        /* nothing */;
    return sc - s;
}
