/* strchrnul from lib/string.c, character parameter taken as char. */

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases strlen(s);
  @  @ ensures s <= strchrnul(s, c) <= s + strlen(s);
  @  @/
  @ void strchrnul_in_range(const char *s, char c)
  @ {
  @   if (*s != '\0' && *s != c)
  @     strchrnul_in_range(s + 1, c);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ requires 0 <= i < strchrnul(s, c) - s;
  @  @ decreases i;
  @  @ ensures s[i] != c && s[i] != '\0';
  @  @/
  @ void strchrnul_skipped(const char *s, char c, size_t i)
  @ {
  @   if (i > 0 && *s != '\0' && *s != c)
  @     strchrnul_skipped(s + 1, c, i - 1);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases strlen(s);
  @  @ ensures valid_str(strchrnul(s, c));
  @  @ ensures *strchrnul(s, c) == c || *strchrnul(s, c) == '\0';
  @  @/
  @ void strchrnul_stops(const char *s, char c)
  @ {
  @   if (*s != '\0' && *s != c)
  @     strchrnul_stops(s + 1, c);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases strlen(s);
  @  @ ensures strchr(s, c) == \null ==> strchrnul(s, c) == s + strlen(s);
  @  @ ensures strchr(s, c) != \null ==> strchrnul(s, c) == strchr(s, c);
  @  @/
  @ void strchrnul_strchr(const char *s, char c)
  @ {
  @   if (*s != '\0' && *s != c)
  @     strchrnul_strchr(s + 1, c);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases strlen(s);
  @  @ ensures strchrnul(s, '\0') == s + strlen(s);
  @  @/
  @ void strchrnul_terminator(const char *s)
  @ {
  @   if (*s != '\0')
  @     strchrnul_terminator(s + 1);
  @ }
  @*/

/*@ requires valid_str(s);
  @ assigns \nothing;
  @ ensures \result == strchrnul(s, c);
  @ ensures \old(s) <= \result <= \old(s) + strlen(\old(s));
  @ ensures *\result == c || *\result == '\0';
  @*/
char *strchrnul(const char *s, char c)
{
    /*@ loop invariant \old(s) <= s <= \old(s) + strlen(\old(s));
      @ loop invariant valid_str(s);
      @ loop invariant strlen(s) == strlen(\old(s)) - (s - \old(s));
      @ loop invariant strchrnul(s, c) == strchrnul(\old(s), c);
      @ loop variant strlen(s);
      @*/
    while (*s && *s != c)
        s++;
    return (char *)s;
}
